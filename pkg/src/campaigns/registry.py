"""
子命令注册表
子命令名到任务类的映射, 以及带参数声明的目录
"""
from typing import Any, Dict, List, Type

from core.errors import PreconditionError
from campaigns.base import Campaign, outcome
from campaigns.audit_campaigns import (
    BasisBoundCampaign, BootstrapCampaign, BumpCampaign, ChainCampaign, Claim52Campaign, Prop41Campaign,
    RAuditCampaign,
)
from campaigns.cube_campaigns import FKGSuiteCampaign
from campaigns.embed_campaigns import CouplingCampaign, EmbedCheckCampaign, HallBoundCampaign
from campaigns.family_campaigns import (
    CounterexampleCampaign, SearchMaxCampaign, SearchMaxCubeCampaign, StabilityCampaign, VerifyAKCampaign,
)
from campaigns.fourier_campaigns import FourierRoundtripCampaign, NoiseCheckCampaign
from campaigns.global_campaigns import (
    ExtractGlobalCampaign, GlobalCrossCampaign, GlobalnessCampaign, LevelDAuditCampaign, SharpProbeCampaign,
)

CAMPAIGNS: Dict[str, Type[Campaign]] = {}


class UnknownCampaignError(PreconditionError):
    """未注册的子命令"""


def register(cls: Type[Campaign]) -> Type[Campaign]:
    if not cls.name:
        raise ValueError(f"{cls.__name__} 没有声明 name")
    if cls.name in CAMPAIGNS:
        raise ValueError(f"子命令重名: {cls.name}")
    CAMPAIGNS[cls.name] = cls
    return cls


def get_campaign(name: str) -> Type[Campaign]:
    try:
        return CAMPAIGNS[name]
    except KeyError:
        raise UnknownCampaignError(f"未知的子命令: {name}") from None


def list_campaigns() -> List[Dict[str, Any]]:
    """全部子命令及其参数声明, 按注册顺序"""
    return [cls.schema() for cls in CAMPAIGNS.values()]


class ListCampaign(Campaign):
    name = 'list'
    description = '列出全部子命令及其参数声明'
    params = ()

    def run(self) -> Dict[str, Any]:
        catalog = list_campaigns()
        return outcome({'campaigns': catalog, 'count': len(catalog)})


for _cls in (
    FourierRoundtripCampaign, NoiseCheckCampaign,
    FKGSuiteCampaign,
    GlobalnessCampaign, ExtractGlobalCampaign, LevelDAuditCampaign, SharpProbeCampaign, GlobalCrossCampaign,
    SearchMaxCampaign, SearchMaxCubeCampaign, VerifyAKCampaign, CounterexampleCampaign, StabilityCampaign,
    CouplingCampaign, HallBoundCampaign, EmbedCheckCampaign,
    BumpCampaign, ChainCampaign, Claim52Campaign, BootstrapCampaign, Prop41Campaign, BasisBoundCampaign,
    RAuditCampaign,
    ListCampaign,
):
    register(_cls)

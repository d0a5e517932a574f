"""
错误类型定义
所有工具箱异常的统一分类, CLI 按类型映射退出码
"""


class ToolkitError(Exception):
    """工具箱异常基类"""


class PreconditionError(ToolkitError, ValueError):
    """前置条件不满足 (偏置非法、非单调输入、空族、参数越界等)"""


class StructuralError(PreconditionError):
    """结构错误: 维数/规模不匹配、坐标越界、文件格式错误"""


class OrderingError(PreconditionError):
    """单侧噪声算子要求 q < p"""


class ResourceGuardError(ToolkitError):
    """精确模式的规模上限被突破"""


# CLI 退出码
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PRECONDITION = 2
EXIT_RESOURCE_GUARD = 3
EXIT_IO = 4
EXIT_UNKNOWN_COMMAND = 5


def exit_code_for(exc: BaseException) -> int:
    """
    异常到退出码的映射

    :param exc: 捕获到的异常
    :return: 退出码
    """
    if isinstance(exc, ResourceGuardError):
        return EXIT_RESOURCE_GUARD
    if isinstance(exc, (PreconditionError, ValueError)):
        return EXIT_PRECONDITION
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_PRECONDITION

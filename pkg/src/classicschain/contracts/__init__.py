from .context import CallerInfo, TxContext
from .registry import ContractRegistry, default_registry

__all__ = ["CallerInfo", "ContractRegistry", "TxContext", "default_registry"]

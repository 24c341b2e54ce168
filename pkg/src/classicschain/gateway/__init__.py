from .config import GatewayConfig, load_config
from .system import GatewaySystem
from .app import create_app

__all__ = ["GatewayConfig", "GatewaySystem", "create_app", "load_config"]

from .store import MediaStore, compute_cid
from .anchor import AnchorQueue, AnchorJob

__all__ = ["AnchorJob", "AnchorQueue", "MediaStore", "compute_cid"]

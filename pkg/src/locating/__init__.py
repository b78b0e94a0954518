from .outcome import LocateOutcome, OUTSIDE
from .locator import locate, locate_2d, locate_3d, locate_batch, locate_ids, locate_id

__all__ = ['LocateOutcome', 'OUTSIDE', 'locate', 'locate_2d', 'locate_3d', 'locate_batch',
           'locate_ids', 'locate_id']

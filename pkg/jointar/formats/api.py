from .tensors import (write_tensor,
                      read_tensor,
                      save_tensor,
                      load_tensor,
                      TENSOR_MAGIC)
from .checkpoint import (Checkpoint,
                         save_checkpoint,
                         load_checkpoint,
                         CHECKPOINT_MAGIC,
                         FORMAT_VERSION)
from .images import write_ppm, read_ppm

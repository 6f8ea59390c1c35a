from .config import TrainConfig
from .schedules import lr_at, order_mode, random_order_probability
from .optimizer import AdamW
from .latent_stats import LatentStats
from .batches import TrainingSet, make_batch, generation_count, question_pairs
from .objective import unified_loss
from .trainer import (train,
                      TrainResult,
                      format_record,
                      read_metrics_log,
                      write_nonfinite_dump)
from .gradcheck import grad_check, GradCheckReport, random_streams, relative_error

from .config import ModelConfig, tiny_config
from .params import ModelParams, init_params, param_shapes
from .backbone import forward, forward_batch, backward, embed
from .kv_cache import KVCache, forward_incremental, BIDIRECTIONAL, CAUSAL
from .heads import text_logits, text_loss, text_probabilities
from .diffusion import (DiffusionSchedule,
                        DiffusionHead,
                        diffusion_loss,
                        diffusion_sample,
                        timestep_embedding)
from .generate import (generate_image_tokens,
                       sample_image_tokens,
                       decode_text,
                       teacher_forced_predictions)
from .pipeline import JointModel

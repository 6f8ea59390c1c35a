from .config import RunConfig, parse_config, read_config, config_text, REQUIRED_KEYS
from .runs import (RunState,
                   restore,
                   checkpoint_tensors,
                   write_run_checkpoint,
                   latest_checkpoint)
from .commands import (cmd_gen_data,
                       cmd_train,
                       cmd_sample,
                       cmd_caption,
                       cmd_vqa,
                       cmd_eval,
                       cmd_sweep,
                       cmd_gradcheck,
                       load_run_config,
                       load_model)
from .main import main, build_parser

from .config import EvalConfig
from .frechet import FeatureMoments, frechet_distance, trace_sqrt_product
from .features import oracle_features, D_FEAT
from .metrics import (toy_fid,
                      fid_noise_floor,
                      attr_match,
                      eval_understanding,
                      teacher_forced_qa_accuracy,
                      generate_for_specs)
from .report import EvalReport, evaluate
from .experiments import (run_lambda_sweep,
                          run_order_comparison,
                          single_task_configs,
                          tradeoff_holds,
                          tradeoff_violations,
                          unified_vs_generation_only)

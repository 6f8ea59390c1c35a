from .vocab import (Vocab,
                    default_vocab,
                    tokenize_text,
                    PAD, BOS, EOS, BOI, SEP,
                    COLORS, SHAPES, POSITIONS, SIZES)
from .config import CodecConfig
from .visual import (encode_image,
                     decode_image,
                     encode_for_understanding,
                     encode_tokens,
                     decode_tokens,
                     grid_to_tokens,
                     tokens_to_grid,
                     codec_matrix,
                     psnr)

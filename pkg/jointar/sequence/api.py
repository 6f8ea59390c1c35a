from .streams import (Entry,
                      TokenStream,
                      build_generation_sequence,
                      build_understanding_sequence,
                      TEXT, IMAGE, BOI_ENTRY, ENCFEAT,
                      GEN, UND, SENTINEL)
from .masks import AttentionMask
from .permutations import (Permutation,
                           sample_permutation,
                           RASTER, RANDOM)
from .batching import Batch, collate, entry_fields

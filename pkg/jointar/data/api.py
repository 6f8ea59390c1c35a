from .scenes import (SceneSpec,
                     ALL_SPECS,
                     IMAGE_SIZE,
                     CAPTION_QUESTION,
                     render,
                     make_caption,
                     make_qa,
                     parse_prompt)
from .oracle import extract_attributes, attribute_hits
from .corpus import (Example,
                     Corpus,
                     TRAIN,
                     HELDOUT,
                     build_corpus,
                     choose_heldout,
                     reference_images,
                     write_corpus,
                     read_corpus)

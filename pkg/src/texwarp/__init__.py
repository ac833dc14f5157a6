"""texwarp: feed-forward semantic-guided texture transfer engine."""

from texwarp.backend import BACKEND_NAME
from texwarp.codec import (
    WeightStore,
    decode,
    encode,
    encode_all,
    load_weights,
    random_weight_store,
    reconstruction_loss,
    save_weights,
)
from texwarp.enhance import EnhancementScope, se
from texwarp.imaging import (
    SemanticMap,
    align_dims,
    load_image,
    parse_semantic_map,
    save_image,
)
from texwarp.pipeline import (
    StageTrace,
    TransferConfig,
    run_transfer,
    stage1_global_align,
    stage2_local_refine,
    stage3_enhance,
)
from texwarp.reform import (
    FusionMode,
    MatchMap,
    PatchBank,
    extract_patches,
    fuse_semantics,
    global_patch_size,
    sgtw_match,
    sgtw_reassemble,
    standardize,
    vstr,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "EnhancementScope",
    "FusionMode",
    "MatchMap",
    "PatchBank",
    "SemanticMap",
    "StageTrace",
    "TransferConfig",
    "WeightStore",
    "__version__",
    "align_dims",
    "decode",
    "encode",
    "encode_all",
    "extract_patches",
    "fuse_semantics",
    "global_patch_size",
    "load_image",
    "load_weights",
    "parse_semantic_map",
    "random_weight_store",
    "reconstruction_loss",
    "run_transfer",
    "save_image",
    "save_weights",
    "se",
    "sgtw_match",
    "sgtw_reassemble",
    "stage1_global_align",
    "stage2_local_refine",
    "stage3_enhance",
    "standardize",
    "vstr",
]

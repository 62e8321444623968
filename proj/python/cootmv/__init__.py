"""COA-tuned MVSIHE contrast enhancement (C++ core via pybind11)."""

from ._cootmv import (  # noqa: F401
    Error,
    GrayImage,
    NiqeModel,
    SvrModel,
    ambe,
    bbhe,
    brisque_features,
    brisque_score,
    classic_he,
    compute_histogram,
    coot_minimize,
    dsihe,
    enhance,
    fit_mvg,
    image_mean,
    load_image,
    load_niqe_model,
    load_svr_model,
    mvsihe_enhance,
    mvsihe_partition,
    niqe_patch_features,
    niqe_score,
    psnr,
    save_image,
    ssi,
    train_niqe,
    variance_split,
)

__all__ = [name for name in dir() if not name.startswith("_")]

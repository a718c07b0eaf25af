"""Reflection-guided selection and cleanup of promptable segmentation masks.

The physical constraint behind the package: a specular highlight always lies
on the surface of the object producing it, so the highlight's location can
pick the right candidate among ambiguous segmentations and anchor the
post-processing that cleans it.
"""

from .components import LabelMap, connected_components, fill_holes, largest_component, postprocess
from .errors import (
    ConfigError,
    DecodeError,
    DegenerateImage,
    DimensionMismatch,
    EmptyLabeling,
    EmptyMask,
    EmptyRegion,
    InvalidSpec,
    NoCandidates,
    NoSpecularRegion,
    NoValidMask,
    ProviderFailure,
    RePoSegError,
    UnsupportedFormat,
    ZeroBaseline,
)
from .image_io import (
    PixelPoint,
    foreground_count,
    read_gray,
    read_image,
    read_mask,
    to_luma,
    write_image,
    write_mask,
)
from .metrics import (
    MetricsReport,
    dsc,
    evaluate_dataset,
    iou,
    otsu,
    pixel_accuracy,
    relative_improvement,
)
from .pipeline import PipelineConfig, PipelineOutput, run_pipeline
from .providers import (
    CandidateSet,
    FilesProvider,
    ProviderSpec,
    SubprocessProvider,
    SyntheticProvider,
    make_provider,
    request_candidates,
)
from .selection import SelectionResult, SelectorConfig, select_mask, white_ratio
from .specular import DetectorConfig, center_of_mass, detect_specular, prompt_point
from .synthetic import (
    SceneSample,
    SceneSpec,
    generate_candidates,
    generate_scene,
    load_scene,
    sample_scene_spec,
    write_scene,
)

__version__ = "0.1.0"

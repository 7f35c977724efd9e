"""reactorkit: store, inspect, compare and visualize reactor simulation
results organized by the physical layout of the core."""

from .model import (
    AssemblyDef,
    AssemblyType,
    DataEntry,
    DataProvider,
    FrozenError,
    GridLabels,
    Material,
    MaterialBlock,
    Phase,
    Reactor,
    ReactorType,
    Ring,
    RodDef,
    RodKind,
    make_default_labels,
)
from .nrdf import (
    CorruptFileError,
    EncodeError,
    LayoutError,
    NotNrdfError,
    NrdfArray,
    NrdfAttr,
    NrdfError,
    NrdfFile,
    NrdfNode,
    UnsupportedVersionError,
    dump,
    read_file,
    write_file,
)
from .reactor_io import load_reactor, load_reactors, store_reactor, store_reactors
from .analysis import (
    AnalysisRegistry,
    AnalysisResult,
    AnalysisTool,
    ShapeError,
    Table,
    ToolParam,
    default_registry,
    pin_diff,
    pin_feature_vectors,
    write_artifacts,
)
from .kmeans import KMeansResult, kmeans
from .render import (
    ColorScale,
    Scope,
    ViewKind,
    ViewSpec,
    color_for,
    compute_scale,
    render_assembly,
    render_core,
    render_plot,
    render_rod,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisRegistry",
    "AnalysisResult",
    "AnalysisTool",
    "AssemblyDef",
    "AssemblyType",
    "ColorScale",
    "CorruptFileError",
    "DataEntry",
    "DataProvider",
    "EncodeError",
    "FrozenError",
    "GridLabels",
    "KMeansResult",
    "LayoutError",
    "Material",
    "MaterialBlock",
    "NotNrdfError",
    "NrdfArray",
    "NrdfAttr",
    "NrdfError",
    "NrdfFile",
    "NrdfNode",
    "Phase",
    "Reactor",
    "ReactorType",
    "Ring",
    "RodDef",
    "RodKind",
    "Scope",
    "ShapeError",
    "Table",
    "ToolParam",
    "UnsupportedVersionError",
    "ViewKind",
    "ViewSpec",
    "color_for",
    "compute_scale",
    "default_registry",
    "dump",
    "kmeans",
    "load_reactor",
    "load_reactors",
    "make_default_labels",
    "pin_diff",
    "pin_feature_vectors",
    "read_file",
    "render_assembly",
    "render_core",
    "render_plot",
    "render_rod",
    "store_reactor",
    "store_reactors",
    "write_artifacts",
    "write_file",
]

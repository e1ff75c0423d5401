"""Course multigraphs, navigation-log mining and path analytics for ODL courses."""

from .errors import (
    AccessDenied,
    DanglingRef,
    DuplicateId,
    EmptyContent,
    GraphTooLarge,
    LearnerMismatch,
    NonAdjacentStep,
    OdlError,
    ParseError,
    StyleMismatch,
    UnsupportedFormat,
)
from .model import (
    EdgeTag,
    LearningActivity,
    LearningEnvironment,
    LearningObject,
    LearningTask,
    ObjectKind,
    PrecedentEdge,
    Violation,
    add_activity,
    add_edge,
    add_object,
    add_task,
    empty_environment,
    is_adjacent,
    isomorphic,
    validate,
)
from .course_format import (
    CourseDocument,
    TabularLine,
    parse_graph_file,
    parse_tabular,
    read_document,
    serialize,
)
from .sessions import (
    DEFAULT_SESSION_TIMEOUT,
    ControlBlock,
    LearningExperience,
    Session,
    Visit,
    build_experience,
    parse_log,
    sessionize,
)
from .paths import (
    CoverageReport,
    Cycle,
    DetourKind,
    classify_cycle,
    coverage,
    detect_cycles,
    erase_cycles,
    split_strategy_tactics,
    visit_order,
)
from .clusters import (
    Cluster,
    ClusterKind,
    CoOccurrenceGraph,
    SessionVisitSet,
    connected_components,
    cooccurrence,
    format_clusters,
    maximal_cliques,
    read_clusters,
    session_visit_sets,
    threshold,
)
from .notes import (
    BROADCAST,
    LearnerNote,
    Message,
    NoteAccess,
    NoteStore,
    attach_note,
    inbox,
    list_notes,
    new_store,
    send_message,
)
from .dot_export import ExportStyle, Overlay, export_dot

__version__ = "0.1.0"

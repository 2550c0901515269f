"""Path spaces, triangular cells, and essential paths on SU(3) ADE graphs."""

__version__ = "0.1.0"

from .graphs import (
    GraphError,
    GraphSpec,
    SpectralData,
    SpectralError,
    Vertex,
    adjacency_matrix,
    build_a_graph,
    build_e5_graph,
    conjugate_graph,
    get_graph,
    graph_from_dict,
    graph_names,
    graph_to_dict,
    load_graph,
    loop_parameter,
    q_dim_triangular,
    q_number,
    save_graph,
    spectral_data,
    validate_graph,
)
from .paths import (
    EdgeTag,
    ElementaryPath,
    GradingMismatch,
    PathGrading,
    PathSpaceTooLarge,
    PathVector,
    concatenate,
    enumerate_paths,
    inner_product,
    is_valid_path,
    iter_gradings,
    make_path,
    parse_word,
    path_space_dim,
    step_is_valid,
    word_str,
    word_type,
)
from .cells import (
    CellFileError,
    CellSolveError,
    CellSystem,
    OrientedTriangle,
    canonical_gauge,
    cell_system,
    collapsed_cell,
    enumerate_triangles,
    gauge_transform,
    load_cells,
    max_sum_rule_residual,
    random_gauge,
    save_cells,
    shipped_cells,
    solve_cells,
    sum_rule_residuals,
)
from .operators import (
    LinearOperator,
    TLReport,
    annihilation,
    apply_annihilation,
    apply_cap,
    apply_creation,
    apply_cup,
    cap,
    cap_grading,
    cap_oriented,
    collapsed_grading,
    creation,
    cup,
    cup_grading,
    expanded_grading,
    tl_f,
    tl_u,
    verify_adjointness,
    verify_tl,
)
from .essential import (
    DecompositionError,
    DecompositionReport,
    Decomposer,
    EssentialBasis,
    EssentialDimReport,
    FactorizationRecord,
    PeelStep,
    SuffixSegment,
    decompose_space,
    essential_basis,
    essential_dims,
    factorize_path,
    is_structurally_essential,
    kernel_operators,
    raw_kernel,
    replay_record,
    verify_decomposition,
    words_of_type,
)
from .fusion import (
    FusionMatrix,
    admissible_triangles,
    fusion_matrices,
    fusion_matrix,
    fusion_table,
)

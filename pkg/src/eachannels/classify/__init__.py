"""EA / EB / 2-LEA decision procedures."""
from .auto import (best_dot_frames, diagonal_frames, ea_auto, example1_diagnostics, is_two_lea,
                   verify_example1, verify_property7)
from .extremal import (ExtremalTestState, direct_m_value, ea_extremal, extremal_frame,
                       extremal_test_state, m_operator)
from .gad import gad_bell_boundary, gad_eb_boundary, recognize_gad
from .rules import (bell_pt_eigenvalues, ea_depolarizing, ea_unital_sufficient, eb_unital_diag,
                    is_eb, not_ea_dot_witness, two_lea_unital)
from .search import ea_numeric, positive_map_min, search_min, witness_value
from .verdict import DEFAULT_BUDGET, Criterion, EaVerdict, SearchBudget, Status

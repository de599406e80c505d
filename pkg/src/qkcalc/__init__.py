"""Exact equivariant quantum K-theory of cominuscule flag varieties.

The ring QK_T(X) is reconstructed from a single Chevalley formula: the
divisor class generates, so every structure constant is pinned down by a
linear solve over the equivariant coefficient field.  Everything is exact
(integers and representation-ring characters); mod-p evaluation exists only
as an independent cross-check and as a fallback for large posets.

Main entry points:

    build_cominuscule(space)   poset + root system for "Gr(3,7)", "LG(4,8)", ...
    qkt_chevalley, sgamma_star quantum Chevalley products of O^{s_gamma}
    full_table(poset)          all structure constants, certified in q-degree
    verify_ktchev2, lg_oracle_chi, ms_solve_classical    independent oracles
"""

__version__ = "0.1.0"

from .chevalley import (
    chev_constants_closed,
    j_class,
    j_weight,
    kt_chevalley,
    qkt_chevalley,
    sgamma_star,
)
from .gamma import ChernPolynomial, GammaElement, QPolynomial
from .poset import (
    CominusculePoset,
    InvalidShape,
    NotContained,
    PosetError,
    Shape,
    UnsupportedSpace,
    build_cominuscule,
)
from .qkring import (
    MultTable,
    TruncationTooSmall,
    full_table,
    load_table,
    modp_tables,
    save_table,
    specialize,
    tables_agree,
)
from .rootsys import RootSystem, build_root_system

__all__ = [
    "ChernPolynomial",
    "CominusculePoset",
    "GammaElement",
    "InvalidShape",
    "MultTable",
    "NotContained",
    "PosetError",
    "QPolynomial",
    "RootSystem",
    "Shape",
    "TruncationTooSmall",
    "UnsupportedSpace",
    "__version__",
    "build_cominuscule",
    "build_root_system",
    "chev_constants_closed",
    "full_table",
    "j_class",
    "j_weight",
    "kt_chevalley",
    "load_table",
    "modp_tables",
    "qkt_chevalley",
    "save_table",
    "sgamma_star",
    "specialize",
    "tables_agree",
]

from .libsvm import (
    parse_libsvm,
    parse_pu_libsvm,
    read_libsvm_rows,
    serialize_libsvm,
    serialize_pu_libsvm,
    write_csv,
)
from .resample import PUSample, make_pu
from .synthetic import (
    SyntheticKind,
    gen_gaussian_pair,
    gen_two_moons,
    generate,
    synthetic_pu,
)

__all__ = [
    "PUSample",
    "SyntheticKind",
    "gen_gaussian_pair",
    "gen_two_moons",
    "generate",
    "make_pu",
    "parse_libsvm",
    "parse_pu_libsvm",
    "read_libsvm_rows",
    "serialize_libsvm",
    "serialize_pu_libsvm",
    "synthetic_pu",
    "write_csv",
]

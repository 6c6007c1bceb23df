from __future__ import annotations

import numpy as np
import pytest

from pywmmd.data.resample import make_pu, positive_count
from pywmmd.domain.types import RngStream
from pywmmd.errors import InsufficientSamplesError, InvalidInputError
from utils import labeled_blobs


def test_sizes_and_composition() -> None:
    data = labeled_blobs(200, 150)
    sample = make_pu(data, 10, 60, 60, RngStream(0), target_pi=0.62)
    assert (sample.pu.n_p, sample.pu.n_u, len(sample.test)) == (10, 60, 60)
    assert sample.pu.pi_plus == 0.62
    assert int(np.sum(sample.hidden_labels == 1)) == 37
    assert int(np.sum(sample.test.labels == 1)) == 37


def test_floor_composition_at_half() -> None:
    sample = make_pu(labeled_blobs(300, 300), 20, 100, 50, RngStream(1), target_pi=0.5)
    assert int(np.sum(sample.hidden_labels == 1)) == 50
    assert int(np.sum(sample.hidden_labels == -1)) == 50


def test_positive_count_guards_representation_error() -> None:
    assert positive_count(100, 0.29) == 29
    assert positive_count(60, 0.62) == 37


def test_rows_are_disjoint_and_labels_consistent() -> None:
    data = labeled_blobs(120, 80)
    sample = make_pu(data, 15, 70, 50, RngStream(2))
    assert sample.positive_rows is not None
    assert sample.unlabeled_rows is not None
    assert sample.test_rows is not None
    rows = np.concatenate([sample.positive_rows, sample.unlabeled_rows, sample.test_rows])
    assert len(set(rows.tolist())) == rows.shape[0]
    assert np.all(data.labels[sample.positive_rows] == 1)
    np.testing.assert_array_equal(data.labels[sample.unlabeled_rows], sample.hidden_labels)
    np.testing.assert_array_equal(data.features[sample.test_rows], sample.test.features)


def test_prior_defaults_to_dataset_fraction() -> None:
    sample = make_pu(labeled_blobs(120, 80), 10, 50, 50, RngStream(3))
    assert sample.pu.pi_plus == pytest.approx(0.6)
    assert int(np.sum(sample.hidden_labels == 1)) == 30


def test_insufficient_samples_name_the_class() -> None:
    data = labeled_blobs(75, 47)
    with pytest.raises(InsufficientSamplesError) as excinfo:
        make_pu(data, 10, 60, 60, RngStream(0), target_pi=0.62)
    assert excinfo.value.what == "positive"
    assert excinfo.value.needed == 84

    with pytest.raises(InsufficientSamplesError) as excinfo:
        make_pu(labeled_blobs(200, 20), 10, 60, 60, RngStream(0), target_pi=0.5)
    assert excinfo.value.what == "negative"


def test_resampling_is_deterministic() -> None:
    data = labeled_blobs(200, 150)
    a = make_pu(data, 10, 60, 60, RngStream(9))
    b = make_pu(data, 10, 60, 60, RngStream(9))
    np.testing.assert_array_equal(a.unlabeled_rows, b.unlabeled_rows)
    np.testing.assert_array_equal(a.test_rows, b.test_rows)


def test_binomial_composition_keeps_sizes() -> None:
    sample = make_pu(labeled_blobs(300, 300), 10, 100, 100, RngStream(4), binomial=True)
    assert (sample.pu.n_u, len(sample.test)) == (100, 100)


def test_invalid_sizes() -> None:
    with pytest.raises(InvalidInputError):
        make_pu(labeled_blobs(10, 10), 0, 5, 5, RngStream(0))

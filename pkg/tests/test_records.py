import json

import numpy as np
import pytest
from pydantic import ValidationError

from qutrit_holonomy.core.holonomy import NAMED_GATES, analytic_unitary, embed_logical
from qutrit_holonomy.tomography.process import chi_from_unitary, collect_records, reduce_chi, unitary_channel
from qutrit_holonomy.tomography.records import (
    MeasurementRecord,
    complex_from_json,
    complex_to_json,
    load_process_matrix,
    process_matrix_document,
    reduced_matrix_document,
)


@pytest.fixture
def not_gate():
    return embed_logical(analytic_unitary(NAMED_GATES["NOT"]))


def test_sampled_record_file(tmp_path, rng, not_gate):
    records = collect_records(unitary_channel(not_gate), shots=100, rng=rng, seed=7)
    path = records.save(tmp_path / "records" / "not.json")
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["basis"][0] == "I" and document["basis"][-1] == "E"
    assert document["shots"] == 100
    assert "probabilities" not in document
    loaded = MeasurementRecord.load(path)
    assert not loaded.exact
    assert np.array_equal(loaded.counts, records.counts)
    assert np.allclose(loaded.frequencies.sum(axis=-1), 1.0)


def test_exact_record_json(not_gate):
    records = collect_records(unitary_channel(not_gate))
    assert records.exact
    loaded = MeasurementRecord.from_json(json.loads(json.dumps(records.to_json())))
    assert np.allclose(loaded.probabilities, records.probabilities)
    assert loaded.shots is None


def test_record_validation():
    with pytest.raises(ValidationError):
        MeasurementRecord()
    with pytest.raises(ValidationError):
        MeasurementRecord(probabilities=np.full((9, 9, 3), 0.5))
    counts = np.zeros((9, 9, 3), dtype=int)
    counts[..., 0] = 10
    with pytest.raises(ValidationError):
        MeasurementRecord(counts=counts, shots=20)
    with pytest.raises(ValidationError):
        MeasurementRecord(counts=counts[:8], shots=10)
    assert MeasurementRecord(counts=counts, shots=10).weights.sum() == 810


def test_process_matrix_documents(not_gate):
    chi = chi_from_unitary(not_gate)
    document = process_matrix_document(chi, "NOT")
    assert document["basis"] == ["I", "X", "Y", "Z", "X0e", "Y0e", "X1e", "Y1e", "E"]
    restored = load_process_matrix(json.loads(json.dumps(document)))
    assert np.allclose(restored.chi, chi.chi)
    assert restored.method == "analytic"

    reduced = reduced_matrix_document(reduce_chi(chi), "NOT")
    assert reduced["basis"] == ["I", "X", "Y", "Z"]
    assert reduced["trace"] == pytest.approx(1.0)


def test_unsupported_basis_is_rejected(not_gate):
    document = process_matrix_document(chi_from_unitary(not_gate))
    document["basis"] = list(reversed(document["basis"]))
    with pytest.raises(ValueError):
        load_process_matrix(document)


def test_complex_pairs():
    m = np.array([[1 + 2j, -0.5j], [3.0, 0.0]])
    assert complex_to_json(m)[0][0] == [1.0, 2.0]
    assert np.array_equal(complex_from_json(complex_to_json(m)), m)

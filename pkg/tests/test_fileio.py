import json
import math

import numpy as np
import pytest

from tantheta.certify import canonical_counterexample, certify_aposteriori, certify_apriori
from tantheta.errors import ParseError, ReportIOError, SizeOverflowError
from tantheta.fileio import (
    CertificateReport,
    build_report,
    content_digest,
    dumps_report,
    read_matrix_market,
    read_report,
    write_matrix_market,
    write_report,
)
from tantheta.linalg import OrthonormalFrame, validate_hermitian


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestReadMatrixMarket:
    def test_array_real_general(self, tmp_path):
        p = _write(tmp_path, "a.mtx", "%%MatrixMarket matrix array real general\n2 2\n2\n0.1\n0.1\n0\n")
        np.testing.assert_array_equal(read_matrix_market(p), [[2, 0.1], [0.1, 0]])

    def test_array_is_column_major(self, tmp_path):
        p = _write(tmp_path, "a.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n")
        np.testing.assert_array_equal(read_matrix_market(p), [[1, 3], [2, 4]])

    def test_hermitian_coordinate_mirrored(self, tmp_path):
        p = _write(
            tmp_path, "h.mtx",
            "%%MatrixMarket matrix coordinate real hermitian\n% comment\n2 2 3\n1 1 2\n2 1 0.1\n2 2 0\n",
        )
        m = read_matrix_market(p)
        assert m[0, 1] == 0.1 and m[1, 0] == 0.1

    def test_complex_hermitian_conjugated(self, tmp_path):
        p = _write(
            tmp_path, "h.mtx",
            "%%MatrixMarket matrix coordinate complex hermitian\n2 2 3\n1 1 1 0\n2 1 0 1\n2 2 1 0\n",
        )
        m = read_matrix_market(p)
        assert m[1, 0] == 1j and m[0, 1] == -1j

    def test_complex_array_frame(self, tmp_path):
        p = _write(tmp_path, "q.mtx", "%%MatrixMarket matrix array complex general\n2 1\n0.6 0\n0 0.8\n")
        np.testing.assert_array_equal(read_matrix_market(p), [[0.6], [0.8j]])

    @pytest.mark.parametrize(
        "text",
        [
            "%%MatrixMarket tensor array real general\n2 2\n1\n2\n3\n4\n",
            "%%MatrixMarket matrix array pattern general\n2 2\n",
            "hello\n",
            "%%MatrixMarket matrix array real general\n2 x\n",
            "%%MatrixMarket matrix array real general\n2 2\n1\n2\nfoo\n4\n",
        ],
    )
    def test_parse_errors(self, tmp_path, text):
        with pytest.raises(ParseError):
            read_matrix_market(_write(tmp_path, "bad.mtx", text))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            read_matrix_market(tmp_path / "nope.mtx")

    def test_size_guard(self, tmp_path):
        p = _write(tmp_path, "big.mtx", "%%MatrixMarket matrix coordinate real general\n5000 5000 1\n1 1 1\n")
        with pytest.raises(SizeOverflowError):
            read_matrix_market(p)

    def test_roundtrip_complex(self, tmp_path, rng):
        m = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        write_matrix_market(tmp_path / "m.mtx", m)
        assert "array complex general" in (tmp_path / "m.mtx").read_text().splitlines()[0]
        np.testing.assert_array_equal(read_matrix_market(tmp_path / "m.mtx"), m)


class TestReports:
    def _report(self, oracle=None):
        a = validate_hermitian([[2.0, 0.1], [0.1, 0.0]])
        q1 = OrthonormalFrame.coordinate(2, [0])
        return build_report(certify_apriori(a, q1), a, q1, oracle)

    def test_roundtrip(self, tmp_path):
        rep = self._report(oracle={"eigenvalues": [1 - math.sqrt(1.01), 1 + math.sqrt(1.01)]})
        write_report(rep, tmp_path / "r.json")
        back = read_report(tmp_path / "r.json")
        assert back == rep
        assert back.certificate["tan_bound"] == rep.certificate["tan_bound"]

    def test_canonical_form(self):
        text = dumps_report(self._report())
        assert text.endswith("\n") and not text.endswith("\n\n")
        d = json.loads(text)
        assert list(d) == sorted(d)
        assert list(d["certificate"]) == sorted(d["certificate"])
        assert '"delta_r": 0.0049875621120890' in text  # 17 significant digits

    def test_seventeen_digits_roundtrip(self, rng):
        for x in rng.standard_normal(200) * 10.0 ** rng.integers(-20, 20, 200):
            assert float(json.loads(dumps_report({"x": float(x)}))["x"]) == x

    def test_zero_bound(self):
        a = validate_hermitian(np.diag([5.0, 1.0]))
        q1 = OrthonormalFrame.coordinate(2, [0])
        text = dumps_report(build_report(certify_apriori(a, q1), a, q1))
        assert '"tan_bound": 0,' in text or '"tan_bound": 0}' in text
        assert '"valid": true' in text

    def test_counterexample_report(self):
        a, q1 = canonical_counterexample()
        text = dumps_report(build_report(certify_apriori(a, q1), a, q1))
        assert '"failure_reason": "RHO_TOO_LARGE"' in text
        assert '"tan_bound": null' in text

    def test_aposteriori_report(self):
        a = validate_hermitian([[2.0, 0.1], [0.1, 0.0]])
        q1 = OrthonormalFrame.coordinate(2, [0])
        d = json.loads(dumps_report(build_report(certify_aposteriori(a, q1, (-0.01, 0.01)), a, q1)))
        assert d["kind"] == "aposteriori" and d["certificate"]["valid"] is True
        assert d["inputs"]["n"] == 2 and d["inputs"]["k"] == 1

    def test_digest_depends_on_content(self):
        assert content_digest(np.eye(2)) == content_digest(np.eye(2))
        assert content_digest(np.eye(2)) != content_digest(2 * np.eye(2))

    def test_unwritable(self, tmp_path):
        with pytest.raises(ReportIOError):
            write_report(self._report(), tmp_path / "missing" / "r.json")

    def test_from_dict(self):
        rep = self._report()
        assert CertificateReport.from_dict(json.loads(dumps_report(rep))) == rep

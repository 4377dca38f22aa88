import os
import shutil
import tempfile
import unittest

import numpy as np
from numpy.testing import assert_allclose

from pygconvex.core.base import manifold_kinds
from pygconvex.core.exceptions import ConditioningError, InputError
from pygconvex.pod.importing.inputs import manifold_of, parse_inline_matrix, parse_point, parse_vector, \
    read_bl_datum, read_document, read_matrix, read_operator, read_posynomial
from pygconvex.pod.tests.util.util import write_json, write_text


class ParseTest(unittest.TestCase):

    def test_vector(self):
        assert_allclose(parse_vector("1.0, 0.5"), [1.0, 0.5])
        for text in ("", "a,b", "1,inf"):
            with self.assertRaises(InputError):
                parse_vector(text)

    def test_inline_matrix(self):
        assert_allclose(parse_inline_matrix("2,0;0,1"), np.diag([2.0, 1.0]))
        with self.assertRaises(InputError):
            parse_inline_matrix("1,2;3")

    def test_points(self):
        p = parse_point(manifold_kinds.orthant, "1,0.5")
        self.assertEqual(str(p.manifold), "orthant(2)")
        with self.assertRaises(InputError):
            parse_point(manifold_kinds.orthant, "1,-0.5")
        q = parse_point(manifold_kinds.spd, "2,1;1,2")
        self.assertEqual(q.manifold.n, 2)
        with self.assertRaises(ConditioningError):
            parse_point(manifold_kinds.spd, "1,2;2,1")
        with self.assertRaises(InputError):
            parse_point(manifold_kinds.spd, "1,2,3")
        with self.assertRaises(InputError):
            manifold_of("sphere", 2)


class DocumentTest(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp(prefix="pygconvex-inputs")

    def tearDown(self):
        shutil.rmtree(self.directory, ignore_errors=True)

    def test_bl_datum(self):
        path = write_json(self.directory, "datum.json", {"n": 2, "p": [1, 1], "B": [[[1, 0]], [[0, 1]]]})
        d = read_bl_datum(path)
        self.assertEqual(d.n, 2)
        self.assertTrue(d.rank_one)

    def test_yaml_datum(self):
        path = write_text(self.directory, "datum.yaml", "n: 1\np: [0.5, 0.5]\nB:\n  - [[1]]\n  - [[2]]\n")
        self.assertEqual(read_bl_datum(path).dims, [1, 1])

    def test_weight_count(self):
        path = write_json(self.directory, "datum.json", {"n": 2, "p": [1], "B": [[[1, 0]], [[0, 1]]]})
        with self.assertRaises(InputError) as ctx:
            read_bl_datum(path)
        self.assertIn(path, str(ctx.exception))

    def test_schema_errors_name_the_file(self):
        path = write_json(self.directory, "datum.json", {"n": 2, "B": [[[1, 0]]]})
        with self.assertRaises(InputError) as ctx:
            read_bl_datum(path)
        self.assertIn(path, str(ctx.exception))

    def test_syntax_errors_have_line_numbers(self):
        path = write_text(self.directory, "broken.yaml", "n: 2\np: [1, 1\n")
        with self.assertRaises(InputError) as ctx:
            read_document(path)
        self.assertIn("line", str(ctx.exception))

    def test_missing_file(self):
        with self.assertRaises(InputError):
            read_document(os.path.join(self.directory, "missing.json"))

    def test_operator(self):
        path = write_json(self.directory, "op.json", {"n": 2, "A": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]})
        T = read_operator(path, probes=5, seed=1)
        self.assertEqual((T.n, T.m), (2, 2))
        bad = write_json(self.directory, "bad.json", {"n": 3, "A": [[[1, 0], [0, 1]]]})
        with self.assertRaises(InputError):
            read_operator(bad)
        singular = write_json(self.directory, "singular.json", {"n": 2, "A": [[[1, 0], [0, 0]]]})
        with self.assertRaises(InputError):
            read_operator(singular)

    def test_matrix(self):
        assert_allclose(read_matrix(write_json(self.directory, "m.json", [[2, 1], [1, 2]])), [[2, 1], [1, 2]])
        assert_allclose(read_matrix(write_json(self.directory, "m2.json", {"matrix": [[1]]})), [[1]])
        point = parse_point(manifold_kinds.spd, os.path.join(self.directory, "m.json"))
        self.assertEqual(point.manifold.n, 2)

    def test_posynomial(self):
        path = write_json(self.directory, "f.json", {"n": 2, "terms": [{"c": 1, "e": [1, 0]}, {"c": 2, "e": [0, 2]}]})
        self.assertEqual(read_posynomial(path), (2, [(1.0, [1.0, 0.0]), (2.0, [0.0, 2.0])]))
        bad = write_json(self.directory, "g.json", {"n": 2, "terms": [{"c": 1, "e": [1]}]})
        with self.assertRaises(InputError):
            read_posynomial(bad)


if __name__ == '__main__':
    unittest.main()

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from topoforge import (
    CostModel,
    Instance,
    InstanceError,
    SolverConfig,
    Thresholds,
    User,
    generate_instance,
    load_config,
    load_instance,
    save_instance,
)
from topoforge.instance import config_from_dict, instance_to_json

from conftest import make_instance, reference_angle_points


class TestDomainTypes:
    def test_weight_must_be_positive(self):
        with pytest.raises(InstanceError):
            User(1, 0.0, 0.0, 0.0)
        with pytest.raises(InstanceError):
            User(1, 0.0, 0.0, -2.0)

    def test_duplicate_ids_rejected(self):
        with pytest.raises(InstanceError, match="duplicate"):
            Instance((User(7, 0, 0, 1), User(7, 1, 1, 1)))

    def test_empty_instance_rejected(self):
        with pytest.raises(InstanceError):
            Instance(())

    def test_arrays_follow_input_order(self):
        inst = make_instance([(0, 1, 2), (3, 4, 5)])
        assert inst.n == 2
        np.testing.assert_array_equal(inst.coords, [[0, 1], [3, 4]])
        np.testing.assert_array_equal(inst.weights, [2, 5])

    def test_cost_model_validation(self):
        with pytest.raises(ValueError):
            CostModel(es_exponent=0.0)
        with pytest.raises(ValueError):
            CostModel(es_exponent=1.5)
        with pytest.raises(ValueError):
            CostModel(link_exponent=-1)

    def test_solver_config_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(epsilon=0)
        with pytest.raises(ValueError):
            SolverConfig(sweep_strategy="nope")
        with pytest.raises(ValueError):
            SolverConfig(bimodal_range_cutoff=1.5)

    def test_thresholds_validation(self):
        with pytest.raises(ValueError):
            Thresholds(min_users=0)
        with pytest.raises(ValueError):
            Thresholds(max_depth=0)


class TestLinkCost:
    def test_unit_exponent(self):
        m = CostModel(link_exponent=1.0)
        assert m.link_cost(2.0, (0, 0), (3, 4)) == 10.0

    def test_zero_distance(self):
        assert CostModel().link_cost(5.0, (2, 2), (2, 2)) == 0.0

    def test_sublinear_exponent(self):
        m = CostModel(link_exponent=0.5)
        assert m.link_cost(4.0, (0, 0), (1, 0)) == pytest.approx(2.0)

    @given(
        w=st.floats(0.1, 50),
        px=st.floats(-10, 10), py=st.floats(-10, 10),
        cx=st.floats(-10, 10), cy=st.floats(-10, 10),
        s=st.floats(0.1, 5),
    )
    def test_symmetric_and_degree_one(self, w, px, py, cx, cy, s):
        m = CostModel()
        a = m.link_cost(w, (px, py), (cx, cy))
        assert a == m.link_cost(w, (cx, cy), (px, py))
        scaled = m.link_cost(w, (s * px, s * py), (s * cx, s * cy))
        assert scaled == pytest.approx(s * a, rel=1e-12, abs=1e-12)


class TestEsCost:
    def test_concave_example(self):
        m = CostModel(es_fixed=5, es_rate=2, es_exponent=0.5)
        assert m.es_cost(4.0) == pytest.approx(9.0)

    def test_linear_case(self):
        m = CostModel(es_fixed=0, es_rate=1, es_exponent=1.0)
        assert m.es_cost(7.0) == pytest.approx(7.0)

    def test_merging_is_cheaper_under_concavity(self):
        m = CostModel(es_fixed=5, es_rate=2, es_exponent=0.5)
        assert m.es_cost(8.0) == pytest.approx(5 + 2 * math.sqrt(8))
        assert m.es_cost(8.0) < m.es_cost(4.0) + m.es_cost(4.0) == 18.0

    @given(w1=st.floats(0.01, 1e4), w2=st.floats(0.01, 1e4))
    def test_strict_subadditivity(self, w1, w2):
        m = CostModel(es_fixed=5, es_rate=2, es_exponent=0.5)
        assert m.es_cost(w1 + w2) < m.es_cost(w1) + m.es_cost(w2)

    @given(w1=st.floats(0.01, 1e4), w2=st.floats(0.01, 1e4))
    def test_additive_boundary(self, w1, w2):
        m = CostModel(es_fixed=0, es_rate=2, es_exponent=1.0)
        assert m.es_cost(w1 + w2) == pytest.approx(m.es_cost(w1) + m.es_cost(w2), rel=1e-12)

    def test_es_cost_of_zero_is_the_fixed_part(self):
        assert CostModel(es_fixed=5).es_cost(0.0) == 5.0


class TestInstanceIO:
    def test_single_record_json(self, tmp_path):
        p = tmp_path / "one.json"
        p.write_text(json.dumps({"users": [{"id": 1, "x": 0.0, "y": 0.0, "w": 1.0}]}))
        inst = load_instance(p)
        assert inst.n == 1 and inst.users[0].id == 1

    def test_duplicate_id_reported(self, tmp_path):
        p = tmp_path / "dup.json"
        p.write_text(json.dumps({"users": [
            {"id": 7, "x": 0, "y": 0, "w": 1},
            {"id": 7, "x": 1, "y": 1, "w": 1},
        ]}))
        with pytest.raises(InstanceError, match="duplicate"):
            load_instance(p)

    def test_nonpositive_weight_reported_with_line(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"users": [
            {"id": 1, "x": 0, "y": 0, "w": 1},
            {"id": 2, "x": 1, "y": 1, "w": -1},
        ]}))
        with pytest.raises(InstanceError, match="line 2"):
            load_instance(p)

    def test_missing_field_reported(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"users": [{"id": 1, "x": 0, "w": 1}]}))
        with pytest.raises(InstanceError, match="line 1"):
            load_instance(p)

    def test_csv_roundtrip(self, tmp_path):
        p = tmp_path / "inst.csv"
        p.write_text("id,x,y,w\n1,0.5,1.5,2.0\n2,-3.25,4.0,1.0\n")
        inst = load_instance(p)
        assert inst.n == 2
        assert inst.users[1].x == -3.25

    def test_csv_header_required(self, tmp_path):
        p = tmp_path / "inst.csv"
        p.write_text("a,b\n1,2\n")
        with pytest.raises(InstanceError, match="header"):
            load_instance(p)

    def test_json_roundtrip_is_identity(self, tmp_path):
        inst = generate_instance(9, seed=3)
        p = tmp_path / "inst.json"
        save_instance(inst, p)
        again = load_instance(p)
        assert again == inst
        assert instance_to_json(again) == instance_to_json(inst)

    def test_reference_angle_instance_roundtrip(self, tmp_path):
        # coordinates realizing the bundled reference angles about a center
        pts = reference_angle_points(center=(5.0, 5.0), radii=(2.0, 1.0, 3.0, 1.5))
        inst = make_instance([(x, y, w) for (x, y), w in zip(pts, (1.0, 2.0, 3.0, 4.0))])
        p = tmp_path / "ref.json"
        save_instance(inst, p)
        back = load_instance(p)
        assert back.n == 4
        np.testing.assert_array_equal(back.weights, [1.0, 2.0, 3.0, 4.0])
        # polar angles about the center survive the round trip
        for u, expected in zip(back.users, (3.65, 0.67, 1.53, 2.11)):
            phi = math.atan2(u.y - 5.0, u.x - 5.0) % (2 * math.pi)
            assert phi == pytest.approx(expected, abs=1e-12)


class TestGenerate:
    def test_single_user_inside_region(self):
        inst = generate_instance(1, seed=0, region=(0, 0, 10, 10))
        u = inst.users[0]
        assert 0 <= u.x <= 10 and 0 <= u.y <= 10

    def test_determinism(self):
        a = generate_instance(20, seed=5)
        b = generate_instance(20, seed=5)
        assert a == b
        assert a != generate_instance(20, seed=6)

    def test_bounds_respected(self):
        inst = generate_instance(50, seed=42, region=(-5, 2, 5, 4), weight_range=(0.5, 0.75))
        assert np.all(inst.coords[:, 0] >= -5) and np.all(inst.coords[:, 0] <= 5)
        assert np.all(inst.coords[:, 1] >= 2) and np.all(inst.coords[:, 1] <= 4)
        assert np.all(inst.weights >= 0.5) and np.all(inst.weights <= 0.75)

    def test_bad_region_and_weights(self):
        with pytest.raises(ValueError, match="region"):
            generate_instance(3, 0, region=(0, 0, 0, 10))
        with pytest.raises(ValueError, match="weight_range"):
            generate_instance(3, 0, weight_range=(0.0, 1.0))
        with pytest.raises(ValueError):
            generate_instance(0, 0)


class TestConfigFile:
    def test_mirrors_field_names(self, tmp_path):
        doc = {
            "epsilon": 1e-6,
            "sweep_strategy": "fibonacci_if_bimodal",
            "min_users": 3,
            "max_depth": 4,
            "es_exponent": 0.7,
        }
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(doc))
        model, thresholds, config = load_config(p)
        assert config.epsilon == 1e-6
        assert config.sweep_strategy == "fibonacci_if_bimodal"
        assert thresholds.min_users == 3 and thresholds.max_depth == 4
        assert model.es_exponent == 0.7

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            config_from_dict({"epsilonn": 1.0})

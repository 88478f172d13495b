import numpy as np
import pytest

from ncsched import (
    SchemaError,
    generate_instance,
    is_reachable,
    open_loop_hit_time,
    read_instance,
    spectral_radius,
    write_instance,
)
from ncsched.instances import dump_json, instance_from_dict, instance_to_dict


class TestGenerateInstance:
    def test_deterministic_for_fixed_seed(self):
        a = generate_instance(4, 2, 9, [1, 2, 2, 3], seed=7)
        b = generate_instance(4, 2, 9, [1, 2, 2, 3], seed=7)
        assert dump_json(instance_to_dict(a)) == dump_json(instance_to_dict(b))

    def test_different_seed_differs(self):
        a = generate_instance(4, 2, 9, [1, 2, 2, 3], seed=7)
        b = generate_instance(4, 2, 9, [1, 2, 2, 3], seed=8)
        assert dump_json(instance_to_dict(a)) != dump_json(instance_to_dict(b))

    def test_plants_unstable_and_reachable(self):
        rec = generate_instance(6, 2, 12, [2, 2, 2, 3, 3, 3], seed=3)
        for p, x in zip(rec.instance.plants, rec.instance.xi):
            assert spectral_radius(p.A) > 1.0
            assert is_reachable(p)
            assert np.abs(x).max() <= 1.0
            assert x.any()

    def test_capacity_must_be_below_plant_count(self):
        with pytest.raises(ValueError):
            generate_instance(2, 2, 5, [1, 1], seed=0)

    def test_dims_length_checked(self):
        with pytest.raises(ValueError):
            generate_instance(3, 1, 5, [1, 1], seed=0)


class TestInstanceFiles:
    def test_round_trip_is_byte_identical(self, tmp_path):
        rec = generate_instance(5, 2, 10, [1, 2, 2, 3, 3], seed=11)
        path_a = tmp_path / "a.json"
        path_b = tmp_path / "b.json"
        write_instance(path_a, rec)
        write_instance(path_b, read_instance(path_a))
        assert path_a.read_bytes() == path_b.read_bytes()

    def test_round_trip_preserves_values(self, tmp_path):
        rec = generate_instance(3, 1, 8, [1, 2, 3], seed=2)
        path = tmp_path / "inst.json"
        write_instance(path, rec)
        back = read_instance(path)
        assert back.seed == rec.seed
        assert back.provenance == rec.provenance
        for p, q in zip(rec.instance.plants, back.instance.plants):
            np.testing.assert_array_equal(p.A, q.A)
            np.testing.assert_array_equal(p.b, q.b)
        for x, y in zip(rec.instance.xi, back.instance.xi):
            np.testing.assert_array_equal(x, y)

    def test_rejects_bad_schema_version(self):
        rec = generate_instance(3, 1, 8, [1, 1, 1], seed=2)
        data = instance_to_dict(rec)
        data["schema_version"] = 99
        with pytest.raises(SchemaError):
            instance_from_dict(data)

    def test_rejects_shape_mismatch(self):
        rec = generate_instance(3, 1, 8, [1, 1, 1], seed=2)
        data = instance_to_dict(rec)
        data["plants"][0]["A"] = [1.0, 2.0]
        with pytest.raises(SchemaError):
            instance_from_dict(data)

    def test_rejects_missing_key(self):
        with pytest.raises(SchemaError):
            instance_from_dict({"schema_version": 1})

    def test_rejects_invalid_json(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("{not json")
        with pytest.raises(SchemaError):
            read_instance(path)

    def test_generated_plants_rarely_zero_open_loop(self):
        # unstable draws keep every plant away from open-loop annihilation
        rec = generate_instance(8, 2, 20, [2] * 4 + [3] * 4, seed=5)
        for p, x in zip(rec.instance.plants, rec.instance.xi):
            assert open_loop_hit_time(p, x, rec.instance.horizon) is None

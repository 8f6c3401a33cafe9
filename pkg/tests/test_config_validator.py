"""config_validator.py のユニットテスト"""
import unittest

from config_validator import validate_config


class TestValidateConfig(unittest.TestCase):
    """validate_config 関数のテストクラス"""

    def setUp(self):
        """テストセットアップ"""
        self.valid_config = {
            "command": "scan",
            "scenario": "TM_CW",
            "wave_file": None,
            "axis": "y",
            "format": "csv",
            "mu_min": -4.0,
            "mu_max": 4.0,
            "mu_n": 129,
            "delta_min": None,
            "delta_max": None,
            "delta_n": None,
            "workers": 1,
            "points": 50,
            "w_p": 1.0,
            "delta_p_pump": 5.0,
            "cat_visibility": 0.5,
        }

    def _problems(self, **changes):
        config = dict(self.valid_config)
        config.update(changes)
        return validate_config(config)

    def test_validate_config_valid(self):
        """有効な設定の検証テスト"""
        self.assertEqual(validate_config(self.valid_config), [])

    def test_wave_file_instead_of_scenario(self):
        self.assertEqual(self._problems(scenario=None, wave_file="wave.txt"), [])

    def test_scenario_and_wave_file(self):
        """状態の指定は一方のみ"""
        problems = self._problems(wave_file="wave.txt")
        self.assertEqual(len(problems), 1)
        self.assertIn("同時に指定できません", problems[0])

    def test_no_state_source(self):
        problems = self._problems(scenario=None)
        self.assertIn("--scenario または --wave-file のどちらかが必要です", problems)

    def test_unknown_scenario(self):
        problems = self._problems(scenario="TM_PULSED")
        self.assertTrue(any("未知のシナリオ" in p for p in problems))

    def test_scenario_case_insensitive(self):
        self.assertEqual(self._problems(scenario="tm-cat"), [])

    def test_panel_command(self):
        """panel は a〜f のみ、シナリオ不要"""
        self.assertEqual(self._problems(command="panel", panel="c", scenario=None), [])
        self.assertEqual(len(self._problems(command="panel", panel="g", scenario=None)), 1)
        self.assertEqual(len(self._problems(command="panel", panel="a", scenario=None, wave_file="w.txt")), 1)

    def test_axis_and_format(self):
        self.assertEqual(len(self._problems(axis="z")), 1)
        self.assertEqual(len(self._problems(format="xml")), 1)
        self.assertEqual(self._problems(axis=None), [])

    def test_grid_points_range(self):
        self.assertEqual(len(self._problems(mu_n=7)), 1)
        self.assertEqual(len(self._problems(delta_n=8193)), 1)
        self.assertEqual(self._problems(mu_n=8, delta_n=8192), [])

    def test_grid_bounds(self):
        """min と max は両方指定し、max > min"""
        self.assertEqual(len(self._problems(mu_max=None)), 1)
        self.assertEqual(len(self._problems(mu_min=4.0)), 1)
        self.assertEqual(len(self._problems(delta_min=1.0, delta_max=-1.0)), 1)

    def test_numeric_parameters(self):
        self.assertEqual(len(self._problems(workers=0)), 1)
        self.assertEqual(len(self._problems(points=0)), 1)
        self.assertEqual(len(self._problems(w_p=0.0)), 1)
        self.assertEqual(len(self._problems(delta_p_pump=-1.0)), 1)
        self.assertEqual(len(self._problems(cat_visibility=1.5)), 1)

    def test_multiple_problems_reported(self):
        problems = self._problems(axis="z", workers=0, mu_n=3)
        self.assertEqual(len(problems), 3)


if __name__ == "__main__":
    unittest.main()

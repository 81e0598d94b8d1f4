# Tests for spaelc

# Tests for rs-bseries

# Copyright 2026 The itshap Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Exact Shapley-Taylor interaction indices via tensor trains."""

from ._itshap import (
    BoundsError,
    CapacityError,
    Error,
    InvalidInput,
    ParseError,
    ShapeError,
    all_interactions,
    explain,
    explain_problem,
    shapley_value,
    stii,
    tt_decompose,
    tt_to_dense,
    value_function,
    weight_slice,
    weight_train,
)

__version__ = "0.1.0"

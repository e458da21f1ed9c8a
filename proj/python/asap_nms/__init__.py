# Copyright 2026 The ASAP-NMS Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Greedy NMS accelerated by anchor-lattice neighbor lookup tables."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import run_variants_json as _run_variants_json

__version__ = "0.1.0"


def run_variants(dataset, variants="asap:0.4", nms=None, threads=1,
                 per_image=False):
    """Runs NMS variants (greedy is always added) and returns the report dict."""
    if nms is None:
        nms = NmsConfig()  # noqa: F405
    return _json.loads(
        _run_variants_json(dataset, variants, nms, threads, per_image))

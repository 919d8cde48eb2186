#!/usr/bin/env python3
# Copyright 2026 The QUDeval Toolkit Authors.
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

"""Regenerates tests/golden/*.txt from data/prompts and tests/golden/slots.json.

Uses a regex substitution that shares no code with the C++ renderer, so the
goldens act as an independent check on it. Review the diff before committing.
"""

import json
import pathlib
import re

ROOT = pathlib.Path(__file__).resolve().parent.parent
SLOT = re.compile(r"\{\{([A-Za-z0-9_-]+)\}\}")


def main():
    slots = json.loads((ROOT / "tests/golden/slots.json").read_text(encoding="utf-8"))
    for template_id, values in sorted(slots.items()):
        body = (ROOT / "data/prompts" / f"{template_id}.txt").read_text(encoding="utf-8")
        if body.endswith("\n"):
            body = body[:-1]
        rendered = SLOT.sub(lambda m: values[m.group(1)], body)
        out = ROOT / "tests/golden" / f"{template_id}.txt"
        out.write_text(rendered, encoding="utf-8")
        print(f"wrote {out.relative_to(ROOT)}")


if __name__ == "__main__":
    main()

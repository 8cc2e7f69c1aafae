#!/usr/bin/env python3
# Copyright 2026 The selftest Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Prepends the Apache-2.0 header to source files that lack it."""

import pathlib
import sys

HEADER = """\
// Copyright 2026 The selftest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

"""

HASH_HEADER = "".join(
    ("# " + line[3:] if line.startswith("// ") else "#" + line[2:]) + "\n" if line else "\n"
    for line in HEADER.splitlines()
)

DIRS = ("src", "include", "tests", "tools")
SLASH_SUFFIXES = {".cc", ".h"}


def header_for(path):
    if path.suffix in SLASH_SUFFIXES:
        return HEADER
    if path.suffix == ".py" or path.name == "CMakeLists.txt":
        return HASH_HEADER
    return None


def apply(path):
    header = header_for(path)
    if header is None:
        return False
    text = path.read_text()
    if "Licensed under the Apache License" in text[:1000]:
        return False
    shebang = ""
    if text.startswith("#!"):
        shebang, _, text = text.partition("\n")
        shebang += "\n"
    path.write_text(shebang + header + text)
    return True


def main(root):
    root = pathlib.Path(root)
    paths = [root / "CMakeLists.txt"]
    for d in DIRS:
        paths.extend(p for p in sorted((root / d).rglob("*")) if p.is_file())
    changed = [p for p in paths if apply(p)]
    for p in changed:
        print(p.relative_to(root))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1] if len(sys.argv) > 1 else "."))

"""Validate emitted JSON artifacts against the schemas in docs/schemas."""
import json
import pathlib
import sys

from jsonschema import Draft202012Validator
from referencing import Registry, Resource


def load(path):
    with open(path) as f:
        return json.load(f)


def main(schema_dir, *artifact_dirs):
    schema_dir = pathlib.Path(schema_dir)
    schemas = {p.name: load(p) for p in schema_dir.glob("*.schema.json")}
    registry = Registry().with_resources(
        (name, Resource.from_contents(s)) for name, s in schemas.items())

    def validator(name):
        return Draft202012Validator(schemas[name], registry=registry)

    checked = 0
    failures = 0
    for d in map(pathlib.Path, artifact_dirs):
        for path in sorted(d.iterdir()):
            if path.name.startswith("report_eps") and path.suffix == ".json":
                name = "report.schema.json"
            elif path.name == "sweep_summary.json":
                name = "sweep_summary.schema.json"
            elif path.name == "diagnostics.json":
                name = "diagnostics.schema.json"
            elif path.suffix == ".json":
                name = "config.schema.json"
            else:
                continue
            errors = list(validator(name).iter_errors(load(path)))
            checked += 1
            for e in errors:
                failures += 1
                print(f"{path}: {e.json_path}: {e.message}")
    print(f"validated {checked} files, {failures} errors")
    if checked == 0:
        print("no artifacts found")
        return 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:]))

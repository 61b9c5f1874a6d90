"""Runs the CLI compare and scan commands and validates every report against the shipped schema."""

import json
import subprocess
import sys

import jsonschema


def reports(cli, args):
    out = subprocess.run([cli, *args], check=True, capture_output=True, text=True).stdout
    return [json.loads(line) for line in out.splitlines() if line.strip()]


def main():
    cli, schema_path = sys.argv[1], sys.argv[2]
    with open(schema_path) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    runs = [
        ["compare", "--prep", "momentum", "--p", "1"],
        ["compare", "--prep", "velocity", "--v", "0.6"],
        ["scan", "--axis", "p", "--from", "0", "--to", "2", "--steps", "3", "--format", "json"],
        ["scan", "--axis", "width", "--prep", "velocity", "--v", "0.3",
         "--from", "0.005", "--to", "0.02", "--steps", "2", "--format", "json"],
    ]
    count = 0
    for args in runs:
        for report in reports(cli, args):
            validator.validate(report)
            count += 1

    # The schema must reject a report missing its preparation parameter.
    broken = reports(cli, runs[0])[0]
    del broken["p"]
    if validator.is_valid(broken):
        sys.exit("schema accepted a momentum report without 'p'")

    print(f"{count} reports valid")


if __name__ == "__main__":
    main()

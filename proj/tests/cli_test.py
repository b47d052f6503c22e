"""End-to-end checks of the o3 command line: exit codes and JSON schemas."""

import json
import pathlib
import subprocess
import sys
import tempfile

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

BIN, CORPUS, SCHEMAS = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
STEMS = ["buyitem", "streamit", "forwarding", "producers", "procx"]

resources = {p.name: json.loads(p.read_text()) for p in SCHEMAS.glob("*.schema.json")}
registry = Registry().with_resources(
    (name, Resource.from_contents(doc)) for name, doc in resources.items()
)
failures = []


def validator(name):
    return Draft202012Validator(resources[name], registry=registry)


def o3(*args, expect=0):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if proc.returncode != expect:
        failures.append(f"o3 {' '.join(map(str, args))}: exit {proc.returncode}, wanted {expect}\n{proc.stderr}")
    return proc.stdout


def validate(name, doc, what):
    errors = sorted(validator(name).iter_errors(doc), key=str)
    if errors:
        failures.append(f"{what} vs {name}: {errors[0].message}")


for stem in STEMS:
    src = CORPUS / f"{stem}.chor"
    validate("wf-report.schema.json", json.loads(o3("check", src, "--json")), f"check {stem}")
    validate("verify.schema.json", json.loads(o3("verify", src, "--json")), f"verify {stem}")
    validate("projection.schema.json", json.loads(o3("project", src, "--json")), f"project {stem}")
    for sub in ("run", "simulate"):
        lines = o3(sub, src, "--json", "--seed", 3).splitlines()
        validate("trace-header.schema.json", json.loads(lines[0]), f"{sub} {stem} header")
        header = json.loads(lines[0])
        if header["steps"] != len(lines) - 1 or not header["terminated"]:
            failures.append(f"{sub} {stem}: header disagrees with {len(lines) - 1} steps")
        for line in lines[1:]:
            validate("trace-step.schema.json", json.loads(line), f"{sub} {stem} step")
    validate("latency.schema.json", json.loads(o3("bench", src, "--json")), f"bench {stem}")

for stem, keys, expect in [("forwarding", "off", 1), ("forwarding", "on", 0), ("procx", "no-tokens", 1), ("procx", "on", 0)]:
    doc = json.loads(o3("civ-demo", CORPUS / f"{stem}.chor", "--keys", keys, "--json", expect=expect))
    validate("civ.schema.json", doc, f"civ-demo {stem} {keys}")
    if (doc["witness"] is not None) != (expect == 1):
        failures.append(f"civ-demo {stem} {keys}: witness presence wrong")

# The in-order choreography trace of the two-buyer program.
lines = o3("run", CORPUS / "buyitem.chor", "--json", "--schedule", "in-order").splitlines()
if len(lines) - 1 != 14:
    failures.append(f"in-order buyitem trace has {len(lines) - 1} steps")
if '"key":[1,[4]]' not in "".join(lines):
    failures.append("key (1,[4]) not serialized as [1,[4]]")
empty = o3("run", CORPUS / "buyitem.chor", "--json", "--bound", 0).splitlines()
if len(empty) != 1:
    failures.append("a zero-step run should print only the header")

with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    (tmp / "bad.chor").write_text("main {\n  p.x -> ;\n}\n")
    o3("check", tmp / "bad.chor", expect=2)
    (tmp / "open.chor").write_text("main {\n  p.x -> q.y;\n}\n")
    report = json.loads(o3("check", tmp / "open.chor", "--json", expect=1))
    validate("wf-report.schema.json", report, "check open.chor")
    if report["wellFormed"]:
        failures.append("open.chor reported well-formed")
    (tmp / "o3.conf").write_text("# run settings\nschedule = \"in-order\"\nseed = 4\n")
    lines = o3("run", CORPUS / "buyitem.chor", "--json", "--config", tmp / "o3.conf").splitlines()
    if len(lines) - 1 != 14:
        failures.append("config file schedule not applied")
    (tmp / "bad.conf").write_text("nonsense = 1\n")
    o3("run", CORPUS / "buyitem.chor", "--config", tmp / "bad.conf", expect=2)
    o3("project", CORPUS / "buyitem.chor", "-o", tmp / "out")
    manifest = json.loads((tmp / "out" / "manifest.json").read_text())
    if not (tmp / "out" / "buyitem_seller.proc").exists():
        failures.append(f"project -o wrote {sorted(p.name for p in (tmp / 'out').iterdir())}")
    if not manifest:
        failures.append("empty manifest")

o3("no-such-command", expect=2)

for f in failures:
    print("FAIL", f)
print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)

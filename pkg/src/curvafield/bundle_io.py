"""Serialization of a full plan bundle to a diff-able JSON document.

The document embeds the complex, the discrete plan, the field assignment
and the funnel (when present), each with a content digest.  The plan
digest lets a benchmark assert that two methods were evaluated on the
identical discrete plan.
"""

import hashlib
import json

import numpy as np

from .errors import ParseError
from .field_eval import PlanBundle
from .fields import FieldAssignment
from .funnel import FunnelRegion
from .mesh import SimplicialComplex
from .planner import DiscretePlan

FORMAT = "curvafield-bundle-v1"


def _digest(obj) -> str:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def bundle_to_doc(bundle: PlanBundle, environment_name: str = "unnamed") -> dict:
    c = bundle.complex
    plan = bundle.plan
    a = bundle.assignment
    complex_doc = {
        "vertices": np.asarray(c.vertices).tolist(),
        "triangles": np.asarray(c.triangles).tolist(),
        "constrained_faces": (
            None
            if c.constrained_faces is None
            else np.asarray(c.constrained_faces, dtype=int).tolist()
        ),
    }
    plan_doc = {
        "goal": np.asarray(plan.goal).tolist(),
        "goal_tri": int(plan.goal_tri),
        "successor": np.asarray(plan.successor).tolist(),
        "hop": np.asarray(plan.hop).tolist(),
        "exit_local": np.asarray(plan.exit_local).tolist(),
    }
    assignment_doc = {
        "method": a.method,
        "cell_kind": np.asarray(a.cell_kind, dtype=int).tolist(),
        "cell_vec": np.asarray(a.cell_vec).tolist(),
        "exit_mid": np.asarray(a.exit_mid).tolist(),
        "face_kind": np.asarray(a.face_kind, dtype=int).tolist(),
        "face_vec": np.asarray(a.face_vec).tolist(),
        "face_role": np.asarray(a.face_role, dtype=int).tolist(),
    }
    funnel_doc = None
    if bundle.funnel is not None:
        f = bundle.funnel
        funnel_doc = {
            "members": sorted(int(t) for t in f.members),
            "internal_faces": sorted(int(t) for t in f.internal_faces),
            "boundary_faces": sorted(int(t) for t in f.boundary_faces),
            "mode": f.mode,
            "goal": np.asarray(f.goal).tolist(),
        }
    doc = {
        "format": FORMAT,
        "environment": environment_name,
        "complex": complex_doc,
        "plan": plan_doc,
        "assignment": assignment_doc,
        "funnel": funnel_doc,
        "digests": {
            "complex": _digest(complex_doc),
            "plan": _digest(plan_doc),
            "assignment": _digest(assignment_doc),
            "funnel": None if funnel_doc is None else _digest(funnel_doc),
        },
    }
    doc["digests"]["bundle"] = _digest(
        [doc["digests"]["complex"], doc["digests"]["plan"],
         doc["digests"]["assignment"], doc["digests"]["funnel"]]
    )
    return doc


def plan_digest(plan: DiscretePlan) -> str:
    return _digest(
        {
            "goal": np.asarray(plan.goal).tolist(),
            "goal_tri": int(plan.goal_tri),
            "successor": np.asarray(plan.successor).tolist(),
            "hop": np.asarray(plan.hop).tolist(),
            "exit_local": np.asarray(plan.exit_local).tolist(),
        }
    )


def save_bundle(bundle: PlanBundle, path, environment_name: str = "unnamed"):
    doc = bundle_to_doc(bundle, environment_name)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    return doc


def doc_to_bundle(doc: dict) -> PlanBundle:
    if doc.get("format") != FORMAT:
        raise ParseError(f"not a {FORMAT} document")
    cd = doc["complex"]
    c = SimplicialComplex(
        np.asarray(cd["vertices"], dtype=float),
        np.asarray(cd["triangles"], dtype=np.int64),
    )
    if cd.get("constrained_faces") is not None:
        c.constrained_faces = np.asarray(cd["constrained_faces"], dtype=bool)
    pd = doc["plan"]
    successor = np.asarray(pd["successor"], dtype=np.int64)
    plan = DiscretePlan(
        goal=np.asarray(pd["goal"], dtype=float),
        goal_tri=int(pd["goal_tri"]),
        successor=successor,
        hop=np.asarray(pd["hop"], dtype=np.int64),
        exit_local=np.asarray(pd["exit_local"], dtype=np.int64),
        reachable=np.asarray(pd["hop"], dtype=np.int64) >= 0,
    )
    ad = doc["assignment"]
    assignment = FieldAssignment(
        method=ad["method"],
        cell_kind=np.asarray(ad["cell_kind"], dtype=np.int8),
        cell_vec=np.asarray(ad["cell_vec"], dtype=float),
        exit_mid=np.asarray(ad["exit_mid"], dtype=float),
        face_kind=np.asarray(ad["face_kind"], dtype=np.int8),
        face_vec=np.asarray(ad["face_vec"], dtype=float),
        face_role=np.asarray(ad["face_role"], dtype=np.int8),
    )
    funnel = None
    if doc.get("funnel") is not None:
        fd = doc["funnel"]
        funnel = FunnelRegion(
            members=set(fd["members"]),
            internal_faces=set(fd["internal_faces"]),
            boundary_faces=set(fd["boundary_faces"]),
            mode=fd["mode"],
            goal=np.asarray(fd["goal"], dtype=float),
        )
    return PlanBundle(c, plan, assignment, funnel)


def load_bundle(path) -> PlanBundle:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad bundle document: {exc}") from exc
    return doc_to_bundle(doc)

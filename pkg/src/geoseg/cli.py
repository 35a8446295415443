"""Command-line frontend: segment an image from a landmark seed and write
the contour JSON, region mask and UI intermediates."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .config import config_from_dict, load_config_file
from .dualcut import segment
from .errors import GeosegError, ParameterError
from .evaluate import jaccard
from .imagecore import (contour_to_json, load_image, load_mask,
                        rasterize_polyline, save_field_f32, save_mask)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="geoseg",
        description="Interactive geodesic segmentation: dual-cut closed "
                    "contours from a landmark point.")
    p.add_argument("--image", required=True, help="input image (PGM P5 or PNG)")
    p.add_argument("--seed", help="landmark point as X,Y")
    p.add_argument("--scribble", help="JSON polyline file of foreground scribble")
    p.add_argument("--barrier", help="JSON polyline file of barrier scribbles")
    p.add_argument("--metric", choices=("aq", "riem", "rsf", "elastica"))
    p.add_argument("--mu", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--ntheta", type=int)
    p.add_argument("--config", help="config file (JSON or key=value lines)")
    p.add_argument("--gt", help="ground-truth mask (PGM) for Jaccard scoring")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--json", action="store_true",
                   help="print a JSON result summary to stdout")
    return p


def load_polylines(path: str) -> list[np.ndarray]:
    """A JSON polyline [[x, y], ...] or a list of such polylines."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, list) or not doc:
        raise ParameterError(f"{path}: expected a polyline or list of polylines")
    if isinstance(doc[0][0], (int, float)):
        doc = [doc]
    return [np.asarray(poly, dtype=np.float64) for poly in doc]


def _scribble_mask(polys, height, width) -> np.ndarray:
    mask = np.zeros((height, width), dtype=bool)
    for poly in polys:
        mask |= rasterize_polyline(poly, height, width)
    return mask


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        doc = load_config_file(args.config) if args.config else {}
        for key, val in (("metric", args.metric), ("mu", args.mu),
                         ("alpha", args.alpha), ("lam", args.lam),
                         ("beta", args.beta), ("T", args.T),
                         ("sigma", args.sigma), ("n_theta", args.ntheta)):
            if val is not None:
                doc[key] = val
        config = config_from_dict(doc)

        img = load_image(args.image)

        if args.seed is None and args.scribble is None:
            print(parser.format_usage(), file=sys.stderr)
            raise ParameterError("either --seed X,Y or --scribble is required")
        if args.seed is not None:
            try:
                sx, sy = (int(v) for v in args.seed.split(","))
            except ValueError as exc:
                raise ParameterError("--seed expects X,Y integers") from exc
            if not (0 <= sx < img.width and 0 <= sy < img.height):
                raise ParameterError("seed lies outside the image")
            seed = (sx, sy)
        else:
            polys = load_polylines(args.scribble)
            pts = np.vstack(polys)
            if (pts[:, 0].min() < 0 or pts[:, 1].min() < 0
                    or pts[:, 0].max() >= img.width or pts[:, 1].max() >= img.height):
                raise ParameterError("scribble leaves the image bounds")
            seed = pts

        barriers = None
        if args.barrier:
            barriers = _scribble_mask(load_polylines(args.barrier),
                                      img.height, img.width)

        t0 = time.perf_counter()
        res = segment(img, seed, config, barriers)
        runtime_ms = (time.perf_counter() - t0) * 1e3

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        contour_json = contour_to_json(res.contour.vertices, True, False)
        (out / "contour.json").write_text(contour_json, encoding="utf-8")
        save_mask(out / "region.pgm", res.region)
        save_mask(out / "theta_z.pgm", res.theta_z)
        save_mask(out / "A.pgm", res.obstacle)
        if res.hom is not None:
            save_field_f32(out / "psi.f32", res.hom.psi)
        (out / "gq.json").write_text(
            contour_to_json(res.gq.vertices, True, res.gq.lifted), encoding="utf-8")
        (out / "a_b.json").write_text(
            json.dumps({"a": list(res.a), "b": list(res.b), "q": list(res.q)}),
            encoding="utf-8")

        summary = {"ok": True, "out": str(out), "runtime_ms": runtime_ms,
                   "vertices": len(res.contour.vertices),
                   "timings_ms": res.timings_ms}
        if args.gt:
            gt = load_mask(args.gt)
            score = jaccard(res.region, gt)
            summary["jaccard"] = score
            with open(out / "jaccard.csv", "w", encoding="utf-8") as fh:
                fh.write("seed_x,seed_y,jaccard,runtime_ms\n")
                zx, zy = res.contour.vertices[0] if args.seed is None else seed
                fh.write(f"{int(zx)},{int(zy)},{score:.6f},{runtime_ms:.3f}\n")
        if args.json:
            print(json.dumps(summary, sort_keys=True))
        else:
            msg = f"wrote {out}/contour.json ({summary['vertices']} vertices)"
            if "jaccard" in summary:
                msg += f", jaccard={summary['jaccard']:.4f}"
            print(msg)
        return 0
    except GeosegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

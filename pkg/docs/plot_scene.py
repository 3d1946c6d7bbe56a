#!/usr/bin/env python3
"""Render a Bloch-ball scene file produced by `bcattack scene`.

Usage:
    bcattack scene --builtin aharonov --out scene.json
    python docs/plot_scene.py scene.json -o scene.png
"""

import argparse
import json

import matplotlib.pyplot as plt
import numpy as np


def draw_ball(ax):
    u = np.linspace(0, 2 * np.pi, 40)
    v = np.linspace(0, np.pi, 20)
    x = np.outer(np.cos(u), np.sin(v))
    y = np.outer(np.sin(u), np.sin(v))
    z = np.outer(np.ones_like(u), np.cos(v))
    ax.plot_wireframe(x, y, z, color="lightgray", linewidth=0.3, alpha=0.5)
    for axis in np.eye(3):
        ax.plot(*zip(-axis, axis), color="gray", linewidth=0.5)


def draw_polytope(ax, poly, color, label):
    verts = np.array(poly["vertices"], dtype=float)
    if poly["kind"] == "point" or len(verts) == 1:
        ax.scatter(*verts.T, color=color, s=40, label=label)
    else:
        ax.plot(*verts.T, color=color, linewidth=2, label=label)
        ax.scatter(*verts.T, color=color, s=25)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("scene", help="scene JSON file")
    parser.add_argument("-o", "--output", default=None, help="image file (default: show)")
    args = parser.parse_args()

    with open(args.scene, encoding="utf-8") as handle:
        scene = json.load(handle)

    fig = plt.figure(figsize=(7, 7))
    ax = fig.add_subplot(projection="3d")
    draw_ball(ax)

    draw_polytope(ax, scene["honest"]["bit0"], "tab:blue", "bit 0 states")
    draw_polytope(ax, scene["honest"]["bit1"], "tab:red", "bit 1 states")
    draw_polytope(ax, scene["decompositions"]["bit0"], "tab:cyan", "decomposition (bit 0)")
    draw_polytope(ax, scene["decompositions"]["bit1"], "tab:orange", "decomposition (bit 1)")

    r = np.array(scene["rho_opt"], dtype=float)
    ax.scatter(*r, color="black", s=70, label="optimal submitted state")
    if scene.get("family"):
        seg = np.array([scene["family"]["base"], scene["family"]["end"]], dtype=float)
        ax.plot(*seg.T, color="gray", linewidth=3, alpha=0.8, label="optimal family")

    ax.set_title(f"{scene['name']} ({scene['case']})")
    ax.set_box_aspect((1, 1, 1))
    ax.legend(loc="upper left", fontsize=8)
    if args.output:
        fig.savefig(args.output, dpi=160, bbox_inches="tight")
    else:
        plt.show()


if __name__ == "__main__":
    main()

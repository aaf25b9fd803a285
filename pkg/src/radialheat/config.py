"""Plain-text configuration of layers and materials.

INI format (configparser).  Layer sections are ordered and named
``[layer.<anything>]``; material sections are ``[material.<id>]``.

    [layer.inner]
    r_start = 1
    r_end = 3/2
    cells = 8
    material = steel

    [material.steel]
    rho = 7800
    cv = 450
    conductivity = 15 1/100     ; polynomial in u, constant term first
    source = 0
    valid_range = -1000 3000

Numbers are parsed as exact rationals (``3/2``, ``1.5`` and ``7`` are all
exact); polynomial coefficient lists are whitespace-separated, constant term
first.  ``load_config(path)`` returns float data for the numerical solvers,
``load_config(path, exact=True)`` keeps Fractions for the exact ones.
"""

from __future__ import annotations

import configparser
from fractions import Fraction
from pathlib import Path

from .materials import MaterialModel, Polynomial
from .mesh import LayerSpec


class ConfigError(ValueError):
    """Malformed layer/material configuration file."""


def _number(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad number {text!r}") from exc


def _coeffs(text: str, exact: bool):
    values = [_number(tok) for tok in text.split()]
    if not values:
        raise ConfigError(f"empty coefficient list {text!r}")
    return values if exact else [float(v) for v in values]


def load_config(path, exact: bool = False):
    """Parse a config file into (layers, materials).

    Returns a list of LayerSpec in file order and a dict mapping material id
    to MaterialModel.  Every layer must reference a defined material.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    text = Path(path).read_text()
    parser.read_string(text)

    materials = {}
    for section in parser.sections():
        if not section.startswith("material."):
            continue
        mat_id = section.split(".", 1)[1]
        sec = parser[section]
        for key in ("rho", "cv", "conductivity"):
            if key not in sec:
                raise ConfigError(f"[{section}] is missing {key!r}")
        valid_range = None
        if "valid_range" in sec:
            bounds = [_number(tok) for tok in sec["valid_range"].split()]
            if len(bounds) != 2:
                raise ConfigError(f"[{section}] valid_range needs two numbers")
            lo, hi = bounds
            valid_range = (lo, hi) if exact else (float(lo), float(hi))
        materials[mat_id] = MaterialModel(
            rho=Polynomial(_coeffs(sec["rho"], exact)),
            cv=Polynomial(_coeffs(sec["cv"], exact)),
            conductivity=Polynomial(_coeffs(sec["conductivity"], exact)),
            source=Polynomial(_coeffs(sec.get("source", "0"), exact)),
            valid_range=valid_range,
        )

    layers = []
    for section in parser.sections():
        if not section.startswith("layer."):
            continue
        sec = parser[section]
        for key in ("r_start", "r_end", "cells", "material"):
            if key not in sec:
                raise ConfigError(f"[{section}] is missing {key!r}")
        mat_id = sec["material"].strip()
        if mat_id not in materials:
            raise ConfigError(
                f"[{section}] references undefined material {mat_id!r}")
        r_start = _number(sec["r_start"])
        r_end = _number(sec["r_end"])
        layers.append(LayerSpec(
            r_start=r_start if exact else float(r_start),
            r_end=r_end if exact else float(r_end),
            material_id=mat_id,
            cells=int(sec["cells"]),
        ))

    if not layers:
        raise ConfigError(f"{path}: no [layer.*] sections found")
    return layers, materials

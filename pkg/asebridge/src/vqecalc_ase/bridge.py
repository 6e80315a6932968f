"""Calculator that proxies energies and forces to a vqecalc engine subprocess.

The bridge performs no chemistry. It serializes the atoms' symbols and
positions (Angstrom) into the engine's line-delimited JSON protocol,
converts the returned Hartree / Hartree-per-Angstrom values into the host
framework's eV / eV-per-Angstrom convention, and manages one long-lived
engine subprocess per calculator instance.
"""

from __future__ import annotations

import json
import subprocess
import sys

import numpy as np

from ._host import CalculationFailed, Calculator, all_changes

EV_PER_HARTREE = 27.211386245988

DEFAULT_ENGINE_CMD = (sys.executable, "-m", "vqecalc", "serve")


class ProtocolError(CalculationFailed):
    """Engine subprocess replied out of protocol; carries both raw lines."""


class BridgeCalculator(Calculator):
    """Energy/forces calculator backed by the native engine's serve mode."""

    implemented_properties = ["energy", "forces"]

    def __init__(self, engine_cmd=None, config=None, config_path=None, **kwargs):
        super().__init__(**kwargs)
        self.engine_cmd = list(engine_cmd) if engine_cmd else list(DEFAULT_ENGINE_CMD)
        if config_path is not None:
            import yaml
            with open(config_path) as f:
                config = yaml.safe_load(f) or {}
        self.config = dict(config or {})
        self._proc: subprocess.Popen | None = None
        self._restarted = False
        self.last_request: str | None = None
        self.last_response: str | None = None

    # -- subprocess management ---------------------------------------------

    def _spawn(self):
        self._proc = subprocess.Popen(
            self.engine_cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL, text=True, bufsize=1)
        reply = self._exchange({"op": "init", **self.config})
        if not reply.get("ok"):
            raise CalculationFailed(f"engine rejected configuration: {reply.get('error')}")

    def _alive(self):
        return self._proc is not None and self._proc.poll() is None

    def _exchange(self, request: dict) -> dict:
        line = json.dumps(request)
        self.last_request = line
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
            raw = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise CalculationFailed(f"engine subprocess pipe failed: {exc}") from exc
        self.last_response = raw
        if not raw:
            raise CalculationFailed("engine subprocess closed its output")
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ProtocolError(
                f"protocol desync: request {line!r} got non-JSON reply {raw!r}") from exc

    def _request(self, request: dict) -> dict:
        if not self._alive():
            if self._proc is not None:  # previously spawned engine died
                if self._restarted:
                    raise CalculationFailed("engine subprocess crashed twice; giving up")
                self._restarted = True
            self._spawn()
        try:
            return self._exchange(request)
        except ProtocolError:
            raise
        except CalculationFailed:
            if self._restarted:
                raise
            self._restarted = True
            self._spawn()
            return self._exchange(request)

    def close(self):
        """Send shutdown and reap the subprocess (idempotent)."""
        if self._proc is None:
            return
        if self._alive():
            try:
                self._proc.stdin.write(json.dumps({"op": "shutdown"}) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError):
                pass
            try:
                self._proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        self._proc = None

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- calculator protocol --------------------------------------------------

    def calculate(self, atoms=None, properties=("energy",),
                  system_changes=all_changes):
        super().calculate(atoms, properties, system_changes)
        atoms = atoms if atoms is not None else self.atoms
        payload = {
            "symbols": list(atoms.get_chemical_symbols()),
            "positions_angstrom": np.asarray(atoms.get_positions(), dtype=float).tolist(),
        }
        op = "forces" if "forces" in properties else "energy"
        reply = self._request({"op": op, "geometry": payload})
        if not reply.get("ok"):
            raise CalculationFailed(f"engine error: {reply.get('error')}")
        self.results = {"energy": reply["energy_hartree"] * EV_PER_HARTREE}
        if op == "forces":
            forces = np.array(reply["forces_hartree_per_angstrom"], dtype=float)
            self.results["forces"] = forces * EV_PER_HARTREE
        self.results["energy_hartree"] = reply["energy_hartree"]

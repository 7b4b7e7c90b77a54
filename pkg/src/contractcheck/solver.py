"""External SMT solver processes: running, model parsing, MaxSMT.

The solver is always a child process speaking SMT-LIB 2 on stdin/stdout.
Three ways to reach one:

* the bundled Node/WebAssembly Z3 shim (default; installed on first use),
* any solver named in the ``CONTRACTCHECK_SOLVER`` environment variable
  (e.g. ``z3 -in -smt2``), fed one script per process,
* a tempfile-based invocation ``<exe> <args...> <file>``.

The bundled shim also supports a persistent mode: workers stay alive between
requests and every request is evaluated in a fresh solver context, which
keeps sessions isolated while skipping interpreter start-up.
"""

from __future__ import annotations

import atexit
import os
import queue
import shlex
import shutil
import subprocess
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import terms
from .encoder import AnalysisInstance, NamedAssertion
from .errors import SolverError
from .smtlib import emit_smtlib, model_queries, parse_sexprs, sexpr_int
from .terms import Const, Implies, Var, conj, eq, ge, le

_SHIM_DIR = Path(__file__).parent / "solverjs"
_RUN_SENTINEL = ";;RUN"
_READY_SENTINEL = ";;READY"


class MaxSmtMode:
    NATIVE = "native"
    ITERATIVE = "iterative"


@dataclass(frozen=True)
class SolverConfig:
    executable: str | None = None        # None: bundled shim
    args: tuple[str, ...] = ()
    timeout: float = 10.0                # seconds per solver call
    maxsmt_mode: str = MaxSmtMode.NATIVE
    use_stdin: bool = True               # False: pass a tempfile path
    persistent: bool = True              # reuse worker processes (shim only)
    workers: int = 4

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


def config_from_env(**overrides) -> SolverConfig:
    """Default configuration, honoring ``CONTRACTCHECK_SOLVER``."""
    spec = os.environ.get("CONTRACTCHECK_SOLVER", "").strip()
    if spec:
        parts = shlex.split(spec)
        exe, args = parts[0], parts[1:]
        if not args and "z3" in Path(exe).name:
            args = ["-in", "-smt2"]
        base = SolverConfig(executable=exe, args=tuple(args), persistent=False,
                            use_stdin=True)
    else:
        base = SolverConfig()
    return replace(base, **overrides) if overrides else base


@dataclass(frozen=True)
class Model:
    int_bindings: dict[str, int] = field(default_factory=dict)
    owner_bindings: dict[str, str] = field(default_factory=dict)  # object -> person id
    owner_raw: dict[str, str] = field(default_factory=dict)
    person_values: dict[str, str] = field(default_factory=dict)
    object_values: dict[str, str] = field(default_factory=dict)
    violated_soft: tuple[str, ...] = ()

    def replay_env(self) -> terms.ReplayEnv:
        return terms.ReplayEnv(self.int_bindings, self.owner_raw,
                               self.person_values, self.object_values)


@dataclass(frozen=True)
class Sat:
    model: Model


@dataclass(frozen=True)
class Unsat:
    core: tuple[str, ...]


@dataclass(frozen=True)
class Unknown:
    reason: str


Verdict = Sat | Unsat | Unknown


# -- bundled shim management --------------------------------------------------

_install_lock = threading.Lock()


def shim_command() -> list[str]:
    """Command line for the bundled solver, installing its dependency once."""
    node = shutil.which("node")
    if node is None:
        raise SolverError(
            "no SMT solver available: node is not installed and "
            "CONTRACTCHECK_SOLVER is not set")
    with _install_lock:
        if not (_SHIM_DIR / "node_modules" / "z3-solver").exists():
            npm = shutil.which("npm")
            if npm is None:
                raise SolverError("npm is required to install the bundled solver")
            proc = subprocess.run(
                [npm, "install", "--no-audit", "--no-fund"],
                cwd=_SHIM_DIR, capture_output=True, text=True, timeout=600)
            if proc.returncode != 0:
                raise SolverError("npm install of the bundled solver failed",
                                  proc.stdout + proc.stderr)
    return [node, str(_SHIM_DIR / "shim.js")]


def _command(config: SolverConfig) -> list[str]:
    if config.executable is None:
        return shim_command()
    return [config.executable, *config.args]


# -- persistent worker pool ---------------------------------------------------

class _Worker:
    def __init__(self, command: list[str]):
        try:
            self.proc = subprocess.Popen(
                command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL, text=True, bufsize=1)
        except OSError as exc:
            raise SolverError(f"cannot start solver process {command[0]!r}: {exc}")
        self.dead = False

    def request(self, script: str, timeout: float) -> str:
        assert self.proc.stdin and self.proc.stdout
        out_lines: list[str] = []
        done = threading.Event()
        failure: list[BaseException] = []

        def reader():
            try:
                while True:
                    line = self.proc.stdout.readline()
                    if not line:
                        raise SolverError("solver process closed its output",
                                          "".join(out_lines))
                    if line.strip() == _READY_SENTINEL:
                        return
                    out_lines.append(line)
            except BaseException as exc:  # surfaced on the caller thread
                failure.append(exc)
            finally:
                done.set()

        thread = threading.Thread(target=reader, daemon=True)
        thread.start()
        try:
            self.proc.stdin.write(script)
            if not script.endswith("\n"):
                self.proc.stdin.write("\n")
            self.proc.stdin.write(_RUN_SENTINEL + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            self.kill()
            raise SolverError(f"solver process is gone: {exc}")
        if not done.wait(timeout):
            self.kill()
            raise TimeoutError("solver call timed out")
        if failure:
            self.kill()
            raise failure[0]
        return "".join(out_lines)

    def kill(self) -> None:
        self.dead = True
        try:
            self.proc.kill()
        except OSError:
            pass


class _WorkerPool:
    def __init__(self):
        self._pools: dict[tuple[str, ...], queue.Queue] = {}
        self._lock = threading.Lock()
        self._all: list[_Worker] = []

    def _pool(self, command: list[str], size: int) -> queue.Queue:
        key = tuple(command)
        with self._lock:
            if key not in self._pools:
                q: queue.Queue = queue.Queue()
                for _ in range(size):
                    q.put(None)  # lazily created slots
                self._pools[key] = q
            return self._pools[key]

    def run(self, command: list[str], script: str, timeout: float, size: int) -> str:
        pool = self._pool(command, size)
        worker = pool.get()
        try:
            if worker is None or worker.dead:
                worker = _Worker(command)
                with self._lock:
                    self._all.append(worker)
            return worker.request(script, timeout)
        finally:
            pool.put(worker if worker is not None and not worker.dead else None)

    def shutdown(self) -> None:
        with self._lock:
            for worker in self._all:
                worker.kill()
            self._all.clear()
            self._pools.clear()


_POOL = _WorkerPool()
atexit.register(_POOL.shutdown)


def _run_script(script: str, config: SolverConfig) -> str:
    """Execute one SMT-LIB script in a solver process and return its output."""
    command = _command(config)
    if config.persistent and config.executable is None:
        return _POOL.run(command, script, config.timeout, config.workers)
    if config.use_stdin:
        try:
            proc = subprocess.Popen(command, stdin=subprocess.PIPE,
                                    stdout=subprocess.PIPE,
                                    stderr=subprocess.STDOUT, text=True)
        except OSError as exc:
            raise SolverError(f"cannot start solver process {command[0]!r}: {exc}")
        try:
            out, _ = proc.communicate(script, timeout=config.timeout)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            raise TimeoutError("solver call timed out")
        return out
    import tempfile
    with tempfile.NamedTemporaryFile("w", suffix=".smt2", delete=False) as handle:
        handle.write(script)
        path = handle.name
    try:
        proc = subprocess.run([*command, path], capture_output=True, text=True,
                              timeout=config.timeout)
        return proc.stdout
    except subprocess.TimeoutExpired:
        raise TimeoutError("solver call timed out")
    except OSError as exc:
        raise SolverError(f"cannot start solver process {command[0]!r}: {exc}")
    finally:
        os.unlink(path)


# -- verdict parsing ----------------------------------------------------------

def _parse_output(output: str, instance: AnalysisInstance) -> Verdict:
    exprs = [e for e in parse_sexprs(output)
             if not (isinstance(e, list) and e and e[0] == "error")]
    status = None
    rest: list = []
    for e in exprs:
        if status is None and e in ("sat", "unsat", "unknown"):
            status = e
        elif status is not None:
            rest.append(e)
    if status is None:
        raise SolverError("solver produced no sat/unsat/unknown answer", output)
    if status == "unknown":
        return Unknown("solver returned unknown")
    if status == "unsat":
        core: tuple[str, ...] = ()
        for e in rest:
            if isinstance(e, list) and all(isinstance(x, str) for x in e):
                core = tuple(e)
                break
        emitted = {a.name for a in instance.hard}
        unexpected = [n for n in core if n not in emitted]
        if unexpected:
            raise SolverError(f"unsat core names {unexpected} were never asserted",
                              output)
        return Unsat(core)
    values = None
    for e in rest:
        if isinstance(e, list) and e and all(isinstance(x, list) and len(x) == 2 for x in e):
            values = e
            break
    model = _parse_model(values or [], instance)
    return Sat(model)


def _parse_model(pairs: list, instance: AnalysisInstance) -> Model:
    ints: dict[str, int] = {}
    owner_raw: dict[str, str] = {}
    person_values: dict[str, str] = {}
    object_values: dict[str, str] = {}
    int_names = set(instance.int_vars())
    persons = set(instance.persons)
    objects = set(instance.objects)
    for key, value in pairs:
        if isinstance(key, str):
            if key in int_names:
                ints[key] = sexpr_int(value)
            elif key in persons:
                person_values[key] = _atom(value)
            elif key in objects:
                object_values[key] = _atom(value)
        elif (isinstance(key, list) and len(key) == 2 and key[0] == "owner"
              and isinstance(key[1], str)):
            owner_raw[key[1]] = _atom(value)
    missing = int_names - set(ints)
    if missing:
        raise SolverError(f"solver model is missing variables {sorted(missing)}")
    owner_bindings = {}
    value_to_person = {v: p for p, v in person_values.items()}
    for obj, raw in owner_raw.items():
        if raw in value_to_person:
            owner_bindings[obj] = value_to_person[raw]
    return Model(ints, owner_bindings, owner_raw, person_values, object_values)


def _atom(value) -> str:
    if isinstance(value, str):
        return value
    return repr(value)


# -- public entry points ------------------------------------------------------

def run_solver(instance: AnalysisInstance, config: SolverConfig,
               native_soft: bool = True) -> Verdict:
    """Solve one instance: emit, run the child process, parse the verdict.

    Timeouts surface as ``Unknown("timeout")``, never as exceptions, so a
    batch never aborts on one slow instance.
    """
    script = emit_smtlib(instance, native_soft=native_soft)
    queries = model_queries(instance)
    if queries:
        script += "(get-value (" + " ".join(queries) + "))\n"
    script += "(get-unsat-core)\n"
    try:
        output = _run_script(script, config)
    except TimeoutError:
        return Unknown("timeout")
    verdict = _parse_output(output, instance)
    if isinstance(verdict, Sat) and instance.soft:
        verdict = Sat(attach_violated_soft(instance, verdict.model))
    return verdict


def attach_violated_soft(instance: AnalysisInstance, model: Model) -> Model:
    env = model.replay_env()
    violated = tuple(a.name for a in instance.soft
                     if not terms.eval_bool(a.term, env))
    return replace(model, violated_soft=violated)


def _indicator_instance(instance: AnalysisInstance, min_satisfied: int) -> AnalysisInstance:
    """Hard instance demanding at least ``min_satisfied`` soft assertions,
    via 0/1 indicator variables."""
    extra: list[NamedAssertion] = []
    total: list = []
    for i, soft in enumerate(instance.soft):
        ind = Var(f"softind_{i}")
        extra.append(NamedAssertion(
            f"softind_def_{i}",
            conj([ge(ind, Const(0)), le(ind, Const(1)),
                  Implies(eq(ind, Const(1)), soft.term)])))
        total.append(ind)
    if not total:
        raise SolverError("iterative MaxSMT called without soft assertions")
    acc = total[0]
    for t in total[1:]:
        acc = terms.Add(acc, t)
    extra.append(NamedAssertion("soft_cardinality", ge(acc, Const(min_satisfied))))
    return AnalysisInstance(instance.kind, instance.target,
                            instance.hard + tuple(extra),
                            instance.persons, instance.objects)


def solve_maxsmt(instance: AnalysisInstance, config: SolverConfig) -> Verdict:
    """Maximize the number of satisfied unit-weight soft assertions.

    Native mode hands soft assertions to the solver; the fallback binary
    searches the largest satisfiable count with indicator variables.  Either
    way the returned model carries the violated soft assertions, evaluated
    independently of the solver.
    """
    if not instance.soft:
        return run_solver(instance, config)
    if config.maxsmt_mode == MaxSmtMode.NATIVE:
        verdict = run_solver(instance, config, native_soft=True)
        if isinstance(verdict, Unsat):
            # optimizing engines may not report cores; re-solve the hard part
            hard_only = AnalysisInstance(instance.kind, instance.target,
                                         instance.hard, instance.persons,
                                         instance.objects)
            return run_solver(hard_only, config)
        return verdict
    # iterative fallback: binary search the largest satisfiable count
    verdict = run_solver(_indicator_instance(instance, 0), config, native_soft=False)
    if isinstance(verdict, Unknown):
        return verdict
    if isinstance(verdict, Unsat):
        hard_only = AnalysisInstance(instance.kind, instance.target,
                                     instance.hard, instance.persons,
                                     instance.objects)
        return run_solver(hard_only, config)
    best = verdict
    low, high = 0, len(instance.soft)
    while low < high:
        mid = (low + high + 1) // 2
        verdict = run_solver(_indicator_instance(instance, mid), config,
                             native_soft=False)
        if isinstance(verdict, Unknown):
            return verdict
        if isinstance(verdict, Sat):
            best = verdict
            low = mid
        else:
            high = mid - 1
    ints = {k: v for k, v in best.model.int_bindings.items()
            if not k.startswith("softind_")}
    model = replace(best.model, int_bindings=ints)
    return Sat(attach_violated_soft(instance, model))

"""
Tests del corpus de regresión.
"""

import pytest
import tempfile
from pathlib import Path
import sys

import yaml

# Añadir src al path para importar módulos
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from pillowcase.corpus import DEFAULT_CORPUS, HANDLERS, CorpusEntry, RunContext, load_corpus, run_corpus, run_entry
from pillowcase.errors import CorpusError

QUICK_ENTRIES = [
    {
        "name": "g_empty_expansion",
        "kind": "g_expansion",
        "nu": [],
        "expected": [{"p": [], "pbar": [], "coeff": "1"}],
    },
    {
        "name": "triple_p1_cylinder",
        "kind": "local_triple",
        "element": "p1",
        "wminus": [3],
        "wplus": [3],
        "expected": "1",
    },
    {
        "name": "growth_graph_A",
        "kind": "growth",
        "gens": "level1",
        "form": "7/30*G6 - 8/3*G4*G2 + 5/9*G4 - 4/3*G2**2",
        "dim": 5,
        "expected": [["4/45", 2]],
    },
    {
        "name": "oracle_tiny",
        "kind": "oracle",
        "profile": {"nu": [], "mus": []},
        "max_d": 1,
    },
    {
        "name": "slow_volume",
        "kind": "volume",
        "slow": True,
        "form": "360*G22**3 - 360*G2*G22**2 + 72*G2**2*G22 - 30*G42*G22 - 5/4*G42"
                " + 3*G2**2 + 15*G22**2 - 15*G2*G22",
        "dim": 5,
        "expected": [["1/3072", 2]],
    },
]


GRAPH_AND_SV_ENTRIES = [
    "graph_row_B1",
    "graph_row_B2",
    "zeta_Peven_cubed",
    "graph_row_C1",
    "graph_row_C2",
    "graph_row_Da",
    "graph_row_Db",
    "graph_row_E",
    "graph_row_F",
    "graph_total_Q_2_1_m1_3",
    "sv_Q_2_1_m1_3_leading",
]

def _write_corpus(document) -> str:
    with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False, encoding='utf-8') as f:
        yaml.safe_dump(document, f, allow_unicode=True)
        return f.name


class TestLoadCorpus:
    """Tests de carga del corpus."""

    def test_default_corpus(self):
        """Test del corpus incluido en el paquete."""
        entries = load_corpus()
        assert DEFAULT_CORPUS.exists()
        assert len(entries) > 0
        names = [entry.name for entry in entries]
        assert "oracle_empty" in names
        assert len(names) == len(set(names))
        assert all(entry.kind in HANDLERS for entry in entries)
        assert set(GRAPH_AND_SV_ENTRIES) <= set(names)

    def test_slow_flag(self):
        """Test de la marca slow separada de los datos."""
        path = _write_corpus({"entries": QUICK_ENTRIES})
        try:
            entries = load_corpus(path)
        finally:
            Path(path).unlink()
        assert [entry.slow for entry in entries] == [False, False, False, False, True]
        assert "slow" not in entries[-1].data
        assert entries[0].data["nu"] == []

    def test_missing_file(self):
        """Test de corpus inexistente."""
        with pytest.raises(CorpusError, match="no encontrado"):
            load_corpus("corpus_inexistente.yaml")

    def test_malformed_documents(self):
        """Test de documentos mal formados."""
        invalid_cases = [
            ({"tests": []}, "entries"),
            ([1, 2], "entries"),
            ({"entries": [{"kind": "oracle"}]}, "name"),
            ({"entries": [{"name": "x", "kind": "magic"}]}, "desconocido"),
        ]
        for document, message in invalid_cases:
            path = _write_corpus(document)
            try:
                with pytest.raises(CorpusError, match=message):
                    load_corpus(path)
            finally:
                Path(path).unlink()

    def test_invalid_yaml(self):
        """Test de YAML inválido."""
        with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False, encoding='utf-8') as f:
            f.write("entries: [")
            path = f.name
        try:
            with pytest.raises(CorpusError, match="parseando"):
                load_corpus(path)
        finally:
            Path(path).unlink()


class TestRunCorpus:
    """Tests de ejecución del corpus."""

    def setup_method(self):
        """Configurar antes de cada test."""
        self.context = RunContext(max_degree=4)

    def test_quick_run(self):
        """Test de ejecución rápida con progreso."""
        path = _write_corpus({"entries": QUICK_ENTRIES})
        try:
            entries = load_corpus(path)
        finally:
            Path(path).unlink()

        seen = []
        results = run_corpus(entries, quick=True, context=self.context, progress=seen.append)
        assert [r.name for r in results] == [e["name"] for e in QUICK_ENTRIES]
        assert seen == results
        assert all(r.passed for r in results), [r.detail for r in results if not r.passed]
        assert results[-1].skipped
        assert not any(r.skipped for r in results[:-1])
        assert results[3].detail == "6 coeficientes coinciden"

    def test_failing_entry(self):
        """Test de una entrada con valor esperado incorrecto."""
        entry = CorpusEntry("wrong", "g_expansion", {"nu": [], "expected": [{"coeff": "2"}]})
        result = run_entry(entry, self.context)
        assert not result.passed
        assert not result.skipped
        assert "se esperaba" in result.detail

    def test_computation_error_is_failure(self):
        """Test de un error de cómputo registrado como falla."""
        entry = CorpusEntry("bad_element", "local_triple",
                            {"element": "nope", "wminus": [1], "wplus": [1], "expected": "0"})
        result = run_entry(entry, self.context)
        assert not result.passed
        assert "nope" in result.detail

    def test_run_continues_after_failure(self):
        """Test de ejecución completa pese a una falla."""
        entries = [
            CorpusEntry("wrong", "g_expansion", {"nu": [], "expected": [{"coeff": "2"}]}),
            CorpusEntry("right", "g_expansion", {"nu": [], "expected": [{"coeff": "1"}]}),
        ]
        results = run_corpus(entries, context=self.context)
        assert [r.passed for r in results] == [False, True]

    @pytest.mark.slow
    def test_default_corpus_quick(self):
        """Test del corpus incluido sin las entradas lentas."""
        results = run_corpus(load_corpus(), quick=True)
        failed = [(r.name, r.detail) for r in results if not r.passed]
        assert failed == []

    def test_graph_total_entry(self):
        """Test de una suma ponderada de corchetes auxiliares."""
        entry = CorpusEntry("total", "graph_total", {
            "terms": [{"coeff": "2", "locals": [], "special": "one"}],
            "cutoff": 6,
            "max_weight": 2,
            "expected": "2",
        })
        result = run_entry(entry, self.context)
        assert result.passed, result.detail

    @pytest.mark.slow
    @pytest.mark.parametrize("name", GRAPH_AND_SV_ENTRIES)
    def test_default_graph_and_sv_entries(self, name):
        """Test de las filas por grafo, la suma total y la serie de Siegel-Veech del corpus incluido."""
        entry = next(e for e in load_corpus() if e.name == name)
        result = run_entry(entry)
        assert result.passed, result.detail


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

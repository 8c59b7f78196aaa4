import numpy as np
import pytest

from irkit.dataset import LABEL, NUMERIC, PROBA, TabularDataset, load_tabular_csv
from irkit.datasets import REGISTRY, load_dataset
from irkit.errors import DomainError, ParseError, SchemaError, ShapeError
from irkit.schema import FeatureSchema


def test_load_three_row_csv(tmp_path):
    p = tmp_path / "tiny.csv"
    p.write_text("a,b,label\n1.0,2.0,yes\n3.5,4.5,no\n-1,0.25,yes\n")
    schema = FeatureSchema.numeric(["a", "b"])
    ds = load_tabular_csv(p, schema, "label")
    assert ds.n_rows == 3
    assert ds.arity == 2
    assert list(ds.labels) == ["yes", "no", "yes"]
    assert ds.classes == ("no", "yes")


def test_load_reorders_columns(tmp_path):
    p = tmp_path / "shuffled.csv"
    p.write_text("label,b,a\nyes,2.0,1.0\n")
    ds = load_tabular_csv(p, FeatureSchema.numeric(["a", "b"]), "label")
    assert ds.rows[0].tolist() == [1.0, 2.0]


def test_missing_column_is_schema_error(tmp_path):
    p = tmp_path / "missing.csv"
    p.write_text("a,label\n1.0,x\n")
    with pytest.raises(SchemaError):
        load_tabular_csv(p, FeatureSchema.numeric(["a", "b"]), "label")


def test_unparseable_cell_names_row_and_column(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,label\n1.0,2.0,x\nabc,4.0,y\n")
    with pytest.raises(ParseError) as err:
        load_tabular_csv(p, FeatureSchema.numeric(["a", "b"]), "label")
    assert err.value.row == 3  # header is line 1
    assert err.value.column == "a"
    assert "abc" in str(err.value)


def test_categorical_value_outside_domain(tmp_path):
    p = tmp_path / "cat.csv"
    p.write_text("a,c,label\n1.0,red,x\n2.0,purple,y\n")
    schema = FeatureSchema.of(("a", "numerical"), ("c", "categorical", ("red", "blue")))
    with pytest.raises(DomainError):
        load_tabular_csv(p, schema, "label")


def test_diabetes_has_442_rows_and_10_features():
    ds = load_dataset("diabetes")
    assert ds.n_rows == 442
    assert ds.arity == 10
    assert ds.target_kind == NUMERIC


@pytest.mark.parametrize("name,n,d", [("wine", 178, 13), ("cancer", 569, 30),
                                      ("housing", 506, 13)])
def test_registry_datasets(name, n, d):
    ds = load_dataset(name)
    assert (ds.n_rows, ds.arity) == (n, d)


def test_registry_is_complete():
    assert set(REGISTRY) == {"wine", "cancer", "housing", "diabetes"}


def test_proba_target_validation():
    schema = FeatureSchema.numeric(["x"])
    rows = np.asarray([[0.0], [1.0]])
    ds = TabularDataset(schema, rows, PROBA,
                        probabilities=[[0.2, 0.8], [0.5, 0.5]])
    assert ds.classes == (0, 1)
    # argmax with ties toward the lowest class index
    assert list(ds.labels) == [1, 0]
    with pytest.raises(DomainError):
        TabularDataset(schema, rows, PROBA, probabilities=[[0.2, 0.9], [0.5, 0.5]])
    with pytest.raises(DomainError):
        TabularDataset(schema, rows, PROBA, probabilities=[[-0.1, 1.1], [0.5, 0.5]])


def test_row_arity_must_match_schema():
    with pytest.raises(ShapeError):
        TabularDataset(FeatureSchema.numeric(["a", "b"]), np.zeros((3, 3)),
                       NUMERIC, values=np.zeros(3))


def test_label_outside_declared_classes():
    with pytest.raises(DomainError):
        TabularDataset(FeatureSchema.numeric(["a"]), np.zeros((2, 1)), LABEL,
                       labels=np.asarray(["x", "z"], dtype=object), classes=("x", "y"))


def test_schema_rejects_duplicates():
    with pytest.raises(SchemaError):
        FeatureSchema.numeric(["a", "a"])
    with pytest.raises(SchemaError):
        FeatureSchema.of(("c", "categorical", ("r", "r")))
    with pytest.raises(SchemaError):
        FeatureSchema.of(("c", "categorical", ()))

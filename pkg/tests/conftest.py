import numpy as np
import pytest

WORKCLASS = ["Private", "Self-emp-not-inc", "Local-gov", "State-gov"]
EDUCATION = ["Bachelors", "HS-grad", "Masters", "Some-college"]
MARITAL = ["Never-married", "Married-civ-spouse", "Divorced"]
OCCUPATION = ["Tech-support", "Sales", "Exec-managerial", "Craft-repair"]
RELATIONSHIP = ["Husband", "Wife", "Own-child", "Not-in-family"]
RACE = ["White", "Black", "Asian-Pac-Islander"]
SEX = ["Male", "Female"]
COUNTRY = ["United-States", "Mexico", "India"]


def adult_rows(n, seed=0, missing_every=0, test_style=False):
    """Rows in the raw census layout: 14 attributes then the income label."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        pick = lambda opts: opts[rng.integers(len(opts))]  # noqa: E731
        income = ">50K" if rng.random() < 0.25 else "<=50K"
        if test_style:
            income += "."
        row = [
            str(int(rng.integers(17, 90))),
            pick(WORKCLASS),
            str(int(rng.integers(20_000, 900_000))),
            pick(EDUCATION),
            str(int(rng.integers(1, 17))),
            pick(MARITAL),
            pick(OCCUPATION),
            pick(RELATIONSHIP),
            pick(RACE),
            pick(SEX),
            str(int(rng.integers(0, 5) * 1000)),
            str(int(rng.integers(0, 3) * 500)),
            str(int(rng.integers(10, 80))),
            pick(COUNTRY),
            income,
        ]
        if missing_every and i % missing_every == missing_every - 1:
            row[1] = "?"
        out.append(row)
    return out


def write_adult(path, rows, header=False):
    lines = []
    if header:
        lines.append("age, workclass, fnlwgt, education, education-num, marital-status, occupation, "
                     "relationship, race, sex, capital-gain, capital-loss, hours-per-week, native-country, income")
    lines += [", ".join(r) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def adult_csv(tmp_path):
    return write_adult(tmp_path / "adult.data", adult_rows(150, missing_every=10))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[key])

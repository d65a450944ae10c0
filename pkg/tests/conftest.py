import pytest

import finpot as fp


@pytest.fixture(scope="session")
def example_op():
    return fp.paper_example()


@pytest.fixture(scope="session")
def example_ast(example_op):
    return fp.ast_decompose(example_op)


@pytest.fixture(scope="session")
def example_cn(example_op, example_ast):
    return fp.cn_decompose(example_op, ast=example_ast)

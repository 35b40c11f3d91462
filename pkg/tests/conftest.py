import pytest

import meshes


@pytest.fixture(scope="session")
def cube():
    return meshes.cube_mesh()


@pytest.fixture(scope="session")
def box_house():
    return meshes.box_house_mesh()


@pytest.fixture(scope="session")
def gabled_house():
    return meshes.gabled_house_mesh()


@pytest.fixture(scope="session")
def vault():
    return meshes.vault_mesh()


@pytest.fixture(scope="session")
def prism():
    return meshes.prism_mesh()


@pytest.fixture(scope="session")
def random_soup():
    return meshes.random_soup_mesh()

from collections import OrderedDict

import numpy as np
import xarray as xr

from forelpb.logging_helper import create_logger
from forelpb.metadata import MetadataHelper, parse_attributes, replace_snippets


def test_parse_attributes_json():
    contents = """
        {
            "title": "FoReL trajectories",
            "creator_name": "{{creator}}"
        }
    """
    attrs = parse_attributes(contents, ".json")
    assert attrs == OrderedDict(
        {
            "title": "FoReL trajectories",
            "creator_name": "{{creator}}",
        }
    )
    assert list(attrs) == ["title", "creator_name"]


def test_parse_attributes_yaml():
    contents = """
        title: >-
          Trajectories of follow-the-regularized-leader dynamics
          on binary graphical polymatrix games
        forelpb_version: "{{forelpb_version}}"
    """
    attrs = parse_attributes(contents, ".yaml")
    assert attrs == OrderedDict(
        {
            "title": "Trajectories of follow-the-regularized-leader dynamics on binary graphical polymatrix games",
            "forelpb_version": "{{forelpb_version}}",
        }
    )
    assert parse_attributes("", ".yml") == OrderedDict()


def test_replace_snippets():
    attributes = OrderedDict(
        {
            "a1": "Lorem ipsum, {{foo}} ipsum.",
            "a2": "ipsum amet.",
            "a3": 42,
        }
    )

    replaced = replace_snippets(
        attributes=attributes,
        snippets={
            "{{foo}}": "XYZ",
        },
    )

    assert replaced == OrderedDict(
        {
            "a1": "Lorem ipsum, XYZ ipsum.",
            "a2": "ipsum amet.",
            "a3": 42,
        }
    )


def test_decorate():
    ds = xr.Dataset(
        data_vars={"x": (("time", "player"), np.full((3, 2), 0.5))},
        coords={"time": [0.0, 1.0, 2.0], "player": [0, 1]},
    )
    helper = MetadataHelper(
        create_logger(),
        OrderedDict({"title": "run {{game}} with {{forelpb_version}}"}),
    )
    helper.set_some_global_attributes({"game": "mmp4"})
    names = helper.decorate(ds, {"{{forelpb_version}}": "1.2.3"})

    assert set(names) == {"time", "player", "x"}
    assert ds.attrs["title"] == "run mmp4 with 1.2.3"
    assert ds.attrs["game"] == "mmp4"
    assert ds["x"].attrs["valid_max"] == 1.0
    assert ds["time"].attrs["long_name"] == "time"
    assert helper.get_global_attributes()["game"] == "mmp4"

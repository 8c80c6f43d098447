import json
from collections import OrderedDict
from typing import Any, Dict, Final, List, Optional

import xarray as xr
import yaml

# variable attributes of the trajectory dataset, used unless overridden
TRAJECTORY_VARIABLE_ATTRIBUTES: Final[Dict[str, Dict[str, Any]]] = {
    "time": {"long_name": "time", "units": "1"},
    "player": {"long_name": "player index"},
    "x": {"long_name": "probability of strategy 0", "valid_min": 0.0, "valid_max": 1.0},
    "z": {"long_name": "score difference of strategy 0 over strategy 1"},
    "payoff": {"long_name": "expected payoff"},
    "sw": {"long_name": "social welfare"},
}


def parse_attributes(contents: str, suffix: str) -> OrderedDict[str, Any]:
    """
    Parses JSON or YAML attribute contents.
    :param suffix:
        ".json", ".yaml" or ".yml".
    """
    if suffix == ".json":
        return json.loads(contents, object_pairs_hook=OrderedDict)
    if suffix in (".yaml", ".yml"):
        res = yaml.load(contents, Loader=yaml.SafeLoader)
        return OrderedDict(res or {})
    raise ValueError(f"Unrecognized contents for format: {suffix}")


class MetadataHelper:
    def __init__(
        self,
        log,  # : loguru.Logger,
        global_attributes: Optional[OrderedDict[str, Any]] = None,
        variable_attributes: Optional[Dict[str, Dict[str, Any]]] = None,
    ):
        self.log = log
        self._global_attrs: OrderedDict[str, Any] = global_attributes or OrderedDict()
        self._var_attrs: Dict[str, Dict[str, Any]] = dict(TRAJECTORY_VARIABLE_ATTRIBUTES)
        self._var_attrs.update(variable_attributes or {})

    def set_some_global_attributes(self, attrs: Dict[str, Any]):
        for k, v in attrs.items():
            self._global_attrs[k] = v

    def get_global_attributes(self) -> OrderedDict[str, Any]:
        return self._global_attrs

    def add_variable_attributes(self, da: xr.DataArray, name: str):
        attrs = self._var_attrs.get(name)
        if attrs is None:
            self.log.warning(f"No attributes for variable '{name}'")
            return
        da.attrs.update(attrs)
        self.log.debug(f"For variable '{name}', added attributes: {list(attrs)}")

    def decorate(self, ds: xr.Dataset, snippets: Dict[str, str]) -> List[str]:
        """
        Adds variable attributes to every variable and coordinate of ``ds`` and
        sets the global attributes with snippets replaced. Returns the decorated
        variable names.
        """
        names = [str(n) for n in list(ds.coords) + list(ds.data_vars)]
        for name in names:
            self.add_variable_attributes(ds[name], name)
        all_snippets = dict(snippets)
        # each global attribute can be referenced as {{key}}
        for k, v in self._global_attrs.items():
            all_snippets["{{" + k + "}}"] = str(v)
        ds.attrs.update(replace_snippets(self._global_attrs, all_snippets))
        return names


def replace_snippets(
    attributes: OrderedDict[str, Any], snippets: Dict[str, str]
) -> OrderedDict[str, Any]:
    """
    :param snippets:
        Example: { "{{forelpb_version}}": "0.1.0" }
    :return:
        A new dictionary with the snippets replaced in string values.
    """
    result = OrderedDict()
    for k, v in attributes.items():
        if isinstance(v, str):
            for snippet, replacement in snippets.items():
                v = v.replace(snippet, replacement)
        result[k] = v
    return result

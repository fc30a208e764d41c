import abc
from dataclasses import dataclass
from typing import Union, Optional

import numpy as np


@dataclass
class InputMetadata:
    command: str
    seed: int
    version: str = "v001"

    def to_product_metadata(self, descriptor: str):
        return ProductMetadata(self.command, self.seed, self.version, descriptor)


@dataclass
class ProductMetadata(InputMetadata):
    descriptor: Optional[str] = None


@dataclass
class DataProductVariable:
    name: str
    value: Union[np.ndarray, int, float, str, list, dict]
    record_varying: bool = True


@dataclass
class DataProduct(metaclass=abc.ABCMeta):
    input_metadata: ProductMetadata

    @abc.abstractmethod
    def to_data_product_variables(self) -> list[DataProductVariable]:
        raise NotImplementedError

"""Strict JSON (de)serialization of problem instances.

Schema::

    {
      "products": [{"id": str, "price": number, "lambda": number,
                    "cont_prob": number (optional)}, ...],
      "span": {"type": "explicit"|"geometric"|"linear_tail",
               "tail": [number] (explicit), "alpha": number (geometric),
               "M": integer}
    }

Unknown fields are rejected.  When every product carries ``cont_prob`` the
multi-purchase catalog is populated alongside the base one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .errors import InvalidInputError
from .instances import Catalog, Product, SpanDistribution, span_from_spec
from .multi_purchase import GeneralCatalog, GeneralProduct

_PRODUCT_FIELDS = {"id", "price", "lambda", "cont_prob"}


@dataclass(frozen=True)
class Instance:
    catalog: Catalog
    span: Optional[SpanDistribution]
    general: Optional[GeneralCatalog]


def parse_instance(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise InvalidInputError("instance JSON must be an object")
    unknown = set(data) - {"products", "span"}
    if unknown:
        raise InvalidInputError(f"unknown instance fields: {sorted(unknown)}")
    raw_products = data.get("products")
    if not isinstance(raw_products, list) or not raw_products:
        raise InvalidInputError("instance needs a nonempty 'products' list")
    products = []
    general_products = []
    for k, item in enumerate(raw_products):
        if not isinstance(item, dict):
            raise InvalidInputError(f"product #{k} must be an object")
        unknown = set(item) - _PRODUCT_FIELDS
        if unknown:
            raise InvalidInputError(f"product #{k}: unknown fields {sorted(unknown)}")
        for req in ("id", "price", "lambda"):
            if req not in item:
                raise InvalidInputError(f"product #{k}: missing field {req!r}")
        products.append(
            Product(id=item["id"], price=float(item["price"]), purchase_prob=float(item["lambda"]))
        )
        if "cont_prob" in item:
            general_products.append(
                GeneralProduct(
                    id=item["id"],
                    price=float(item["price"]),
                    purchase_prob=float(item["lambda"]),
                    cont_prob=float(item["cont_prob"]),
                )
            )
    if general_products and len(general_products) != len(products):
        raise InvalidInputError("either every product or none must carry cont_prob")
    span = None
    if "span" in data and data["span"] is not None:
        span = span_from_spec(data["span"])
    general = GeneralCatalog(general_products) if general_products else None
    return Instance(catalog=Catalog(products), span=span, general=general)


def load_instance(path: Union[str, Path]) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return parse_instance(data)


def instance_to_dict(
    catalog: Catalog,
    span: Optional[SpanDistribution] = None,
    general: Optional[GeneralCatalog] = None,
) -> dict:
    cont = {p.id: p.cont_prob for p in general.products} if general is not None else {}
    products = []
    for p in catalog.products:
        entry: dict = {"id": p.id, "price": p.price, "lambda": p.purchase_prob}
        if p.id in cont:
            entry["cont_prob"] = cont[p.id]
        products.append(entry)
    data: dict = {"products": products}
    if span is not None:
        data["span"] = {"type": "explicit", "tail": list(span.tail)}
    return data


def dump_instance(
    path: Union[str, Path],
    catalog: Catalog,
    span: Optional[SpanDistribution] = None,
    general: Optional[GeneralCatalog] = None,
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(catalog, span, general), fh, indent=2, sort_keys=True)
        fh.write("\n")

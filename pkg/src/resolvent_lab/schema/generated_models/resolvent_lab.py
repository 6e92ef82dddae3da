from __future__ import annotations

import re
import sys
from datetime import (
    date,
    datetime,
    time
)
from decimal import Decimal
from enum import Enum
from typing import (
    Any,
    ClassVar,
    Literal,
    Optional,
    Union
)

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    RootModel,
    SerializationInfo,
    SerializerFunctionWrapHandler,
    field_validator,
    model_serializer
)


metamodel_version = "None"
version = "None"


class ConfiguredBaseModel(BaseModel):
    model_config = ConfigDict(
        serialize_by_alias = True,
        validate_by_name = True,
        validate_assignment = True,
        validate_default = True,
        extra = "forbid",
        arbitrary_types_allowed = True,
        use_enum_values = True,
        strict = False,
    )

    @model_serializer(mode='wrap', when_used='unless-none')
    def treat_empty_lists_as_none(
            self, handler: SerializerFunctionWrapHandler,
            info: SerializationInfo) -> dict[str, Any]:
        if info.exclude_none:
            _instance = self.model_copy()
            for field, field_info in type(_instance).model_fields.items():
                if getattr(_instance, field) == [] and not(
                        field_info.is_required()):
                    setattr(_instance, field, None)
        else:
            _instance = self
        return handler(_instance, info)



class LinkMLMeta(RootModel):
    root: dict[str, Any] = {}
    model_config = ConfigDict(frozen=True)

    def __getattr__(self, key:str):
        return getattr(self.root, key)

    def __getitem__(self, key:str):
        return self.root[key]

    def __setitem__(self, key:str, value):
        self.root[key] = value

    def __contains__(self, key:str) -> bool:
        return key in self.root


linkml_meta = LinkMLMeta({'default_prefix': 'rlab',
     'default_range': 'string',
     'description': 'Human-authored documents consumed by resolvent_lab: generator '
                    'documents describing an infinitesimal generator f(z) = (z - '
                    'tau)(1 - z conj(tau)) p(z) through its Herglotz part p, and '
                    'suite configurations selecting which checks to run over which '
                    'generators and resolvent parameters.\n',
     'id': 'https://example.org/resolvent_lab',
     'imports': ['linkml:types'],
     'name': 'resolvent_lab',
     'prefixes': {'linkml': {'prefix_prefix': 'linkml',
                             'prefix_reference': 'https://w3id.org/linkml/'},
                  'rlab': {'prefix_prefix': 'rlab',
                           'prefix_reference': 'https://example.org/resolvent_lab/'}},
     'source_file': 'src/resolvent_lab/schema/configuration/resolvent_lab.yaml',
     'title': 'Resolvent Lab documents'} )

class InapplicablePolicy(str, Enum):
    """
    What to do with a (generator, r, check) task whose precondition fails.

    """
    # Reject the configuration with a ConfigError.
    error = "error"
    # Record the task as skipped in the summary.
    skip = "skip"



class HerglotzAtom(ConfiguredBaseModel):
    """
    A point mass of the Herglotz measure at exp(i angle) on the unit circle.

    """
    linkml_meta: ClassVar[LinkMLMeta] = LinkMLMeta({'from_schema': 'https://example.org/resolvent_lab'})

    angle: float = Field(default=..., description="""Position of the atom in radians.""", json_schema_extra = { "linkml_meta": {'domain_of': ['HerglotzAtom']} })
    mass: float = Field(default=..., ge=0, json_schema_extra = { "linkml_meta": {'domain_of': ['HerglotzAtom']} })


class SchwarzFunctionSpec(ConfiguredBaseModel):
    """
    Finite Blaschke-structured Schwarz function omega(z) = exp(i rotation_angle) z^power prod_j (z - a_j)/(1 - conj(a_j) z).

    """
    linkml_meta: ClassVar[LinkMLMeta] = LinkMLMeta({'from_schema': 'https://example.org/resolvent_lab'})

    rotation_angle: Optional[float] = Field(default=0.0, json_schema_extra = { "linkml_meta": {'domain_of': ['SchwarzFunctionSpec'], 'ifabsent': 'float(0)'} })
    power: Optional[int] = Field(default=1, ge=1, json_schema_extra = { "linkml_meta": {'domain_of': ['SchwarzFunctionSpec'], 'ifabsent': 'int(1)'} })
    zeros: Optional[list[list[float]]] = Field(default=[], description="""Blaschke zeros as [re, im] pairs inside the unit disk.""", json_schema_extra = { "linkml_meta": {'domain_of': ['SchwarzFunctionSpec']} })


class HerglotzSpec(ConfiguredBaseModel):
    """
    Herglotz part p of the generator. Either atoms (+ gamma), giving the Riesz-Herglotz integral of a finite atomic measure, or q (+ omega), giving p = (q + conj(q) omega)/(1 - omega). An absent omega encodes omega identically zero, i.e. the constant p = q.

    """
    linkml_meta: ClassVar[LinkMLMeta] = LinkMLMeta({'from_schema': 'https://example.org/resolvent_lab'})

    atoms: Optional[list[HerglotzAtom]] = Field(default=None, json_schema_extra = { "linkml_meta": {'domain_of': ['HerglotzSpec']} })
    gamma: Optional[float] = Field(default=None, json_schema_extra = { "linkml_meta": {'domain_of': ['HerglotzSpec']} })
    q: Optional[list[float]] = Field(default=None, description="""p(0) = f'(0) as [re, im].""", json_schema_extra = { "linkml_meta": {'domain_of': ['HerglotzSpec']} })
    omega: Optional[SchwarzFunctionSpec] = Field(default=None, json_schema_extra = { "linkml_meta": {'domain_of': ['HerglotzSpec']} })


class GeneratorDocument(ConfiguredBaseModel):
    """
    Berkson-Porta data of one generator.

    """
    linkml_meta: ClassVar[LinkMLMeta] = LinkMLMeta({'from_schema': 'https://example.org/resolvent_lab', 'tree_root': True})

    label: Optional[str] = Field(default=None, json_schema_extra = { "linkml_meta": {'domain_of': ['GeneratorDocument']} })
    tau: Optional[list[float]] = Field(default=[0.0, 0.0], description="""Denjoy-Wolff point as [re, im].""", json_schema_extra = { "linkml_meta": {'domain_of': ['GeneratorDocument']} })
    herglotz: HerglotzSpec = Field(default=..., json_schema_extra = { "linkml_meta": {'domain_of': ['GeneratorDocument']} })


class GridSpec(ConfiguredBaseModel):
    linkml_meta: ClassVar[LinkMLMeta] = LinkMLMeta({'from_schema': 'https://example.org/resolvent_lab'})

    radii: Optional[int] = Field(default=64, ge=1, json_schema_extra = { "linkml_meta": {'domain_of': ['GridSpec'], 'ifabsent': 'int(64)'} })
    angles: Optional[int] = Field(default=256, ge=1, json_schema_extra = { "linkml_meta": {'domain_of': ['GridSpec'], 'ifabsent': 'int(256)'} })
    outer_radius: Optional[float] = Field(default=0.999, json_schema_extra = { "linkml_meta": {'domain_of': ['GridSpec'], 'ifabsent': 'float(0.999)'} })


class ToleranceSpec(ConfiguredBaseModel):
    linkml_meta: ClassVar[LinkMLMeta] = LinkMLMeta({'from_schema': 'https://example.org/resolvent_lab'})

    solver: Optional[float] = Field(default=1e-13, json_schema_extra = { "linkml_meta": {'domain_of': ['ToleranceSpec'], 'ifabsent': 'float(1e-13)'} })
    check_slack: Optional[float] = Field(default=1e-9, json_schema_extra = { "linkml_meta": {'domain_of': ['ToleranceSpec'], 'ifabsent': 'float(1e-9)'} })


class SuiteConfig(ConfiguredBaseModel):
    """
    A reproducible batch of checks. Every requested check is run for every generator (and, for checks that depend on it, for every r).

    """
    linkml_meta: ClassVar[LinkMLMeta] = LinkMLMeta({'from_schema': 'https://example.org/resolvent_lab', 'tree_root': True})

    generators: Optional[list[GeneratorDocument]] = Field(default=[], json_schema_extra = { "linkml_meta": {'domain_of': ['SuiteConfig']} })
    generator_files: Optional[list[str]] = Field(default=[], json_schema_extra = { "linkml_meta": {'domain_of': ['SuiteConfig']} })
    r_values: list[float] = Field(default=..., json_schema_extra = { "linkml_meta": {'domain_of': ['SuiteConfig']} })
    grid: Optional[GridSpec] = Field(default=None, json_schema_extra = { "linkml_meta": {'domain_of': ['SuiteConfig']} })
    tolerances: Optional[ToleranceSpec] = Field(default=None, json_schema_extra = { "linkml_meta": {'domain_of': ['SuiteConfig']} })
    checks: list[str] = Field(default=..., json_schema_extra = { "linkml_meta": {'domain_of': ['SuiteConfig']} })
    output_dir: Optional[str] = Field(default="reports", json_schema_extra = { "linkml_meta": {'domain_of': ['SuiteConfig'], 'ifabsent': 'string(reports)'} })
    seed: Optional[int] = Field(default=0, json_schema_extra = { "linkml_meta": {'domain_of': ['SuiteConfig'], 'ifabsent': 'int(0)'} })
    on_inapplicable: Optional[InapplicablePolicy] = Field(default='error', json_schema_extra = { "linkml_meta": {'domain_of': ['SuiteConfig'], 'ifabsent': 'string(error)'} })


# Model rebuild
# see https://pydantic-docs.helpmanual.io/usage/models/#rebuilding-a-model
HerglotzAtom.model_rebuild()
SchwarzFunctionSpec.model_rebuild()
HerglotzSpec.model_rebuild()
GeneratorDocument.model_rebuild()
GridSpec.model_rebuild()
ToleranceSpec.model_rebuild()
SuiteConfig.model_rebuild()

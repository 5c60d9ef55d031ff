// Copyright 2026 The GrEff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GREFF_PRECISION_HPP_
#define GREFF_PRECISION_HPP_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "greff/types.hpp"

namespace greff {

class EffectPrecisionDerivation;

// Proof term for A ⊑ B.
class PrecisionDerivation {
 public:
  enum class Rule { BoolRefl, UnitRefl, StrRefl, QueueCong, ArrowCong };

  static PrecisionDerivation bool_refl();
  static PrecisionDerivation unit_refl();
  static PrecisionDerivation str_refl();
  static PrecisionDerivation queue_cong(PrecisionDerivation inner);
  static PrecisionDerivation arrow_cong(PrecisionDerivation dom,
                                        EffectPrecisionDerivation eff,
                                        PrecisionDerivation cod);

  Rule rule() const;
  const ValueType& left() const;
  const ValueType& right() const;

  const PrecisionDerivation& inner() const;  // QueueCong
  const PrecisionDerivation& dom() const;    // ArrowCong
  const EffectPrecisionDerivation& eff() const;
  const PrecisionDerivation& cod() const;

  friend bool operator==(const PrecisionDerivation& a,
                         const PrecisionDerivation& b);

 private:
  struct Node;
  explicit PrecisionDerivation(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> node_;
};

using EntryDerivations =
    std::map<std::string, std::pair<PrecisionDerivation, PrecisionDerivation>>;

// Proof term for σ ⊑ τ.
class EffectPrecisionDerivation {
 public:
  enum class Rule { DynRefl, Inj, ConcreteCong };

  static EffectPrecisionDerivation dyn_refl();
  // `concrete` must prove σc ⊑ Σ restricted to the support of σc.
  static EffectPrecisionDerivation inj(EffectPrecisionDerivation concrete);
  static EffectPrecisionDerivation concrete_cong(EntryDerivations entries);

  Rule rule() const;
  const EffectType& left() const;
  const EffectType& right() const;

  const EffectPrecisionDerivation& injected() const;  // Inj
  const EntryDerivations& entries() const;           // ConcreteCong

  friend bool operator==(const EffectPrecisionDerivation& a,
                         const EffectPrecisionDerivation& b);

 private:
  struct Node;
  explicit EffectPrecisionDerivation(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> node_;
};

std::optional<PrecisionDerivation> derive_precision(const Signature& sig,
                                                    const ValueType& a,
                                                    const ValueType& b);
std::optional<EffectPrecisionDerivation> derive_precision(
    const Signature& sig, const EffectType& a, const EffectType& b);

PrecisionDerivation reflexivity(const Signature& sig, const ValueType& a);
EffectPrecisionDerivation reflexivity(const Signature& sig,
                                      const EffectType& a);

// c : A ⊑ B, d : B ⊑ C gives A ⊑ C. Throws EndpointMismatch.
PrecisionDerivation compose_derivations(const PrecisionDerivation& c,
                                        const PrecisionDerivation& d);
EffectPrecisionDerivation compose_derivations(
    const EffectPrecisionDerivation& c, const EffectPrecisionDerivation& d);

std::string to_string(const PrecisionDerivation& d);
std::string to_string(const EffectPrecisionDerivation& d);

}  // namespace greff

#endif  // GREFF_PRECISION_HPP_

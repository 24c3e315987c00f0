#include "hypolab/mizohata.hpp"

#include <cmath>
#include <stdexcept>

#include "nlohmann/json.hpp"

namespace hypolab {

SymbolPoly MizohataForm::reassemble() const {
  const int dim = split.n + split.m;
  SymbolPoly out = P0.embed_good(split);
  for (const auto& [pj, qj] : terms) {
    // Q_j is a monic monomial over the bad block; lift it to full dimension.
    if (qj.terms().size() != 1) throw std::logic_error("MizohataForm: Q_j not a monomial");
    const auto& [beta, coef] = *qj.terms().begin();
    std::vector<int> e(dim, 0);
    for (int k = 0; k < split.m; ++k) e[split.n + k] = beta[k];
    SymbolPoly lift = SymbolPoly::monomial(dim, MultiIndex(e), coef).with_split(split);
    out = out + pj.embed_good(split) * lift;
  }
  return out.with_split(split);
}

CoefficientField CoefficientField::constant(double v) {
  CoefficientField f;
  f.fn_ = [v](const std::vector<double>&) { return v; };
  f.desc_ = std::to_string(v);
  return f;
}

CoefficientField CoefficientField::expression(Expr e) {
  CoefficientField f;
  f.desc_ = e.text();
  f.fn_ = [e = std::move(e)](const std::vector<double>& p) { return e.eval(p); };
  return f;
}

CoefficientField CoefficientField::table(std::vector<std::pair<double, double>> box,
                                         std::vector<int> shape, std::vector<double> values) {
  const int d = static_cast<int>(box.size());
  if (shape.size() != box.size()) throw std::invalid_argument("table: shape/box mismatch");
  size_t total = 1;
  for (int s : shape) {
    if (s < 2) throw std::invalid_argument("table: need >= 2 points per axis");
    total *= static_cast<size_t>(s);
  }
  if (values.size() != total) throw std::invalid_argument("table: value count mismatch");
  CoefficientField f;
  f.desc_ = "table[" + std::to_string(total) + "]";
  f.fn_ = [box = std::move(box), shape = std::move(shape), values = std::move(values),
           d](const std::vector<double>& p) {
    if (static_cast<int>(p.size()) != d)
      throw std::invalid_argument("table: wrong point dimension");
    std::vector<int> i0(d);
    std::vector<double> w(d);
    for (int k = 0; k < d; ++k) {
      double t = (p[k] - box[k].first) / (box[k].second - box[k].first) * (shape[k] - 1);
      t = std::clamp(t, 0.0, static_cast<double>(shape[k] - 1));
      i0[k] = std::min(static_cast<int>(t), shape[k] - 2);
      w[k] = t - i0[k];
    }
    double acc = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
      double weight = 1.0;
      size_t idx = 0;
      for (int k = 0; k < d; ++k) {
        int bit = (corner >> k) & 1;
        weight *= bit ? w[k] : 1.0 - w[k];
        idx = idx * shape[k] + (i0[k] + bit);
      }
      acc += weight * values[idx];
    }
    return acc;
  };
  return f;
}

double CoefficientField::operator()(const std::vector<double>& point) const {
  if (!fn_) throw std::logic_error("CoefficientField: empty");
  return fn_(point);
}

bool OperatorDescription::inside_compact(const std::vector<double>& point) const {
  if (compact_box.empty()) return true;
  if (point.size() != compact_box.size())
    throw std::invalid_argument("inside_compact: wrong point dimension");
  for (size_t k = 0; k < point.size(); ++k)
    if (point[k] < compact_box[k].first || point[k] > compact_box[k].second) return false;
  return true;
}

SymbolPoly OperatorDescription::symbol_at(const std::vector<double>& point) const {
  if (!inside_compact(point)) return type_symbol;
  SymbolPoly out(split.n + split.m, split);
  for (const auto& t : terms) {
    double c = t.coeff(point);
    out = out + t.symbol.scale(rc_from(std::complex<double>(c, 0.0)));
  }
  return out.with_split(split);
}

OperatorDescription OperatorDescription::constant(const SymbolPoly& P) {
  OperatorDescription d;
  if (!P.split()) throw std::invalid_argument("OperatorDescription: symbol needs a split");
  d.split = *P.split();
  d.type_symbol = P;
  d.terms.push_back({CoefficientField::constant(1.0), P});
  return d;
}

OperatorDescription OperatorDescription::from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  OperatorDescription d;
  if (!j.contains("split")) throw std::invalid_argument("operator json: missing split");
  d.split = {j["split"]["n"].get<int>(), j["split"]["m"].get<int>()};
  auto parse_sym = [&](const nlohmann::json& js) {
    if (js.is_string()) return parse_symbol(js.get<std::string>(), d.split);
    return SymbolPoly::from_json(js.dump()).with_split(d.split);
  };
  if (!j.contains("type_symbol")) throw std::invalid_argument("operator json: missing type_symbol");
  d.type_symbol = parse_sym(j["type_symbol"]);
  if (j.contains("compact_set") && j["compact_set"].contains("box")) {
    for (const auto& iv : j["compact_set"]["box"])
      d.compact_box.emplace_back(iv[0].get<double>(), iv[1].get<double>());
  }
  for (const auto& jt : j.value("terms", nlohmann::json::array())) {
    Term t{CoefficientField::constant(1.0), parse_sym(jt.at("symbol"))};
    if (jt.contains("coeff_expr")) {
      t.coeff = CoefficientField::expression(
          Expr::parse(jt["coeff_expr"].get<std::string>(), d.split.n, d.split.m));
    } else if (jt.contains("coeff_grid")) {
      const auto& g = jt["coeff_grid"];
      std::vector<std::pair<double, double>> box;
      for (const auto& iv : g.at("box")) box.emplace_back(iv[0].get<double>(), iv[1].get<double>());
      t.coeff = CoefficientField::table(std::move(box), g.at("shape").get<std::vector<int>>(),
                                        g.at("values").get<std::vector<double>>());
    } else if (jt.contains("coeff_const")) {
      t.coeff = CoefficientField::constant(jt["coeff_const"].get<double>());
    }
    d.terms.push_back(std::move(t));
  }
  return d;
}

MizohataForm decompose_constant(const SymbolPoly& P) {
  if (!P.split()) throw std::invalid_argument("decompose_constant: split required");
  MizohataForm form;
  form.split = *P.split();
  const int m = form.split.m;
  form.P0 = SymbolPoly(form.split.n);
  for (const auto& [beta, pb] : P.bad_coefficients()) {
    SymbolPoly good = pb.restrict_to_good();
    if (beta.order() == 0) {
      form.P0 = good;
    } else if (!good.is_zero()) {
      SymbolPoly q = SymbolPoly::monomial(m, beta);  // monic eta^beta
      form.terms.emplace_back(good, q);
    }
  }
  return form;
}

FrozenOperator freeze(const OperatorDescription& L, const std::vector<double>& point) {
  return {point, L.symbol_at(point)};
}

TypeReport verify_type(const MizohataForm& form, const SymbolPoly& M,
                       const SamplingSchedule& sched) {
  TypeReport rep;
  rep.head_order = compare_strength(form.P0, M, sched).order;
  bool ok = rep.head_order == StrengthOrder::EQUIVALENT;
  for (const auto& [pj, qj] : form.terms) {
    (void)qj;
    StrengthOrder o = compare_strength(pj, M, sched).order;
    rep.term_orders.push_back(o);
    ok = ok && o == StrengthOrder::STRICTLY_WEAKER;
  }
  rep.ok = ok;
  return rep;
}

ConstantStrengthForm constant_strength_form(const OperatorDescription& L,
                                            const std::vector<double>& point) {
  ConstantStrengthForm out;
  out.frozen = freeze(L, point);
  for (const auto& t : L.terms) {
    const double c0 = t.coeff(point);
    auto coeff = t.coeff;
    auto d = [coeff, c0](const std::vector<double>& p) { return coeff(p) - c0; };
    if (std::abs(d(point)) > 1e-12)
      throw std::logic_error("constant_strength_form: perturbation does not vanish at the point");
    out.perturbations.push_back({std::move(d), t.symbol});
  }
  return out;
}

}  // namespace hypolab

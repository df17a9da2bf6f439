// Tap values evaluated independently in 120-digit arithmetic.

pub const RRC_035_SPS2: [f64; 23] = [
    0.0019447524839649514887,
    0.0053054332984709682648,
    -0.0082216760741362469616,
    0.0014446987312586672931,
    0.0067690351226191579602,
    -0.017999376551947203461,
    0.018113452797779200381,
    0.040391492993297453639,
    -0.095580301085852737087,
    -0.059888092502768336951,
    0.42978259973529002255,
    0.77476933253408725437,
    0.42978259973529002255,
    -0.059888092502768336951,
    -0.095580301085852737087,
    0.040391492993297453639,
    0.018113452797779200381,
    -0.017999376551947203461,
    0.0067690351226191579602,
    0.0014446987312586672931,
    -0.0082216760741362469616,
    0.0053054332984709682648,
    0.0019447524839649514887,
];
pub const RRC_025_SPS2: [f64; 23] = [
    0.0065744308840494668537,
    -0.0053056305616608292439,
    -0.0020741468960556331885,
    0.015006589394483852908,
    -0.012938661628905066021,
    -0.026528152808304146219,
    0.046175400141126942334,
    0.037516473486209632271,
    -0.12042918443177782986,
    -0.045426516538901183803,
    0.43971576902309033282,
    0.75547548963518377342,
    0.43971576902309033282,
    -0.045426516538901183803,
    -0.12042918443177782986,
    0.037516473486209632271,
    0.046175400141126942334,
    -0.026528152808304146219,
    -0.012938661628905066021,
    0.015006589394483852908,
    -0.0020741468960556331885,
    -0.0053056305616608292439,
    0.0065744308840494668537,
];
pub const GAUSSIAN_035_SPS2: [f64; 9] = [
    0.00000045870827944738566735,
    0.00020552285521750084985,
    0.016093950356955901825,
    0.22026433231020774531,
    0.52687147153867880927,
    0.22026433231020774531,
    0.016093950356955901825,
    0.00020552285521750084985,
    0.00000045870827944738566735,
];
pub const GAUSSIAN_035_SPS8: [f64; 33] = [
    0.00000011467986573314862837,
    0.00000062134907653045007857,
    0.0000030188329062800997327,
    0.000013152170494009316144,
    0.000051381966486043708693,
    0.00018000267106831830564,
    0.00056546029379162639617,
    0.0015928695713396298646,
    0.0040235856834220506742,
    0.0091138364135930790734,
    0.018511607807832147192,
    0.03371646143575088819,
    0.055067425609948231411,
    0.080649651559168640972,
    0.10591687376593249227,
    0.12473339658071609907,
    0.13172107921721639971,
    0.12473339658071609907,
    0.10591687376593249227,
    0.080649651559168640972,
    0.055067425609948231411,
    0.03371646143575088819,
    0.018511607807832147192,
    0.0091138364135930790734,
    0.0040235856834220506742,
    0.0015928695713396298646,
    0.00056546029379162639617,
    0.00018000267106831830564,
    0.000051381966486043708693,
    0.000013152170494009316144,
    0.0000030188329062800997327,
    0.00000062134907653045007857,
    0.00000011467986573314862837,
];

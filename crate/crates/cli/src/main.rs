fn main() {
    std::process::exit(almsq::run(std::env::args_os()));
}

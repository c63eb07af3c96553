fn main() {
    std::process::exit(spectraforge::run(std::env::args_os()));
}

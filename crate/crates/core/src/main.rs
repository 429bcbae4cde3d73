fn main() {
    std::process::exit(pos_relay::cli::run(std::env::args_os()));
}
